//! Exact closed-form Lagrangian action of piecewise-linear four-body paths,
//! its pairwise Keplerian decomposition, and an independent quadrature oracle.

use crate::geometry::Configuration;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Pair order used everywhere a 6-vector of pair quantities appears.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Bisection depth limit for the quadrature oracle.
pub const ORACLE_DEPTH_LIMIT: u32 = 40;

#[derive(Debug, Error)]
pub enum ActionError {
    #[error("collision on segment {segment}, pair ({},{})", pair.0 + 1, pair.1 + 1)]
    Collision { segment: usize, pair: (usize, usize) },
    #[error("ill-conditioned near-collision on segment {segment}, pair ({},{})", pair.0 + 1, pair.1 + 1)]
    Degenerate { segment: usize, pair: (usize, usize) },
    #[error("quadrature did not converge on segment {segment}")]
    NonConvergence { segment: usize },
    #[error("invalid path: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralError {
    /// The segment passes through (or starts/ends at) the origin; the
    /// integral diverges.
    Collision,
    /// Relative motion antiparallel to the separation with near-zero impact
    /// parameter: the log form has no usable precision.
    Degenerate,
}

/// Numeric type the closed-form integral is generic over, so the same code
/// path serves plain evaluation and forward-mode differentiation.
pub trait Scalar:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
}

/// Closed form of `int_0^1 du / sqrt((a+bu)^2 + (c+du)^2)`, assuming the
/// caller has already ruled out collisions and degeneracies.
///
/// The antiderivative is `(1/|v|) ln(p + u + r(u))` with `p = (ab+cd)/|v|^2`
/// and `r(u)` the distance scaled by the speed `|v| = sqrt(b^2+d^2)`. The
/// endpoint terms `p + r(0)` and `p + 1 + r(1)` cancel catastrophically when
/// the motion approaches the origin; they are replaced by the algebraically
/// equivalent `h^2 / (r - p)` (with `h` the scaled impact parameter, using
/// `r^2 - p^2 = h^2`), which is exact and stable on the cancelling branch.
pub fn line_integral_raw<S: Scalar>(a: S, b: S, c: S, d: S) -> S {
    let v2 = b * b + d * d;
    if v2.value() == 0.0 {
        return S::from_f64(1.0) / (a * a + c * c).sqrt();
    }
    let speed = v2.sqrt();
    let p0 = (a * b + c * d) / v2;
    let p1 = p0 + S::from_f64(1.0);
    let r0 = (a * a + c * c).sqrt() / speed;
    let r1 = ((a + b) * (a + b) + (c + d) * (c + d)).sqrt() / speed;
    let h = (a * d - c * b) / v2;
    // h^2 cancels between the two endpoint terms when both take the stable
    // branch, so exactly colinear recession (h = 0) stays well-defined.
    let ratio = if p0.value() >= 0.0 {
        (p1 + r1) / (p0 + r0)
    } else if p1.value() < 0.0 {
        (r0 - p0) / (r1 - p1)
    } else {
        (p1 + r1) * (r0 - p0) / (h * h)
    };
    ratio.ln() / speed
}

/// Minimum of sqrt((a+bu)^2+(c+du)^2) over u in [0,1].
pub fn segment_min_distance(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let v2 = b * b + d * d;
    let u = if v2 == 0.0 {
        0.0
    } else {
        (-(a * b + c * d) / v2).clamp(0.0, 1.0)
    };
    (a + b * u).hypot(c + d * u)
}

/// Validated closed-form evaluation of the unit-interval inverse-distance
/// integral for the relative motion (a+bu, c+du).
pub fn line_inverse_distance_integral(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
) -> Result<f64, IntegralError> {
    let r0 = a.hypot(c);
    let r1 = (a + b).hypot(c + d);
    let scale = r0.max(r1);
    if scale == 0.0 {
        return Err(IntegralError::Collision);
    }
    let dmin = segment_min_distance(a, b, c, d);
    if dmin <= 1e-12 * scale {
        return Err(IntegralError::Collision);
    }
    let v2 = b * b + d * d;
    if v2 > 0.0 {
        let ustar = -(a * b + c * d) / v2;
        let himp = (a * d - c * b).abs() / v2.sqrt();
        if himp < 1e-13 * scale && ustar > 0.0 && ustar < 1.0 {
            return Err(IntegralError::Degenerate);
        }
    }
    Ok(line_integral_raw(a, b, c, d))
}

/// A path visiting `nodes` at strictly increasing `times`, moving linearly
/// at constant velocity on each segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolylinePath {
    times: Vec<f64>,
    nodes: Vec<Configuration>,
}

impl PolylinePath {
    pub fn new(times: Vec<f64>, nodes: Vec<Configuration>) -> Result<Self, ActionError> {
        if times.len() != nodes.len() {
            return Err(ActionError::InvalidInput(format!(
                "{} times vs {} nodes",
                times.len(),
                nodes.len()
            )));
        }
        if times.len() < 2 {
            return Err(ActionError::InvalidInput("need at least 2 nodes".into()));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(ActionError::InvalidInput(
                "times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, nodes })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn nodes(&self) -> &[Configuration] {
        &self.nodes
    }

    pub fn num_segments(&self) -> usize {
        self.times.len() - 1
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Piecewise-linear evaluation; clamps outside the time range.
    pub fn eval(&self, t: f64) -> Configuration {
        if t <= self.times[0] {
            return self.nodes[0];
        }
        if t >= *self.times.last().unwrap() {
            return *self.nodes.last().unwrap();
        }
        let j = match self
            .times
            .binary_search_by(|x| x.partial_cmp(&t).unwrap())
        {
            Ok(j) => return self.nodes[j],
            Err(j) => j - 1,
        };
        let u = (t - self.times[j]) / (self.times[j + 1] - self.times[j]);
        let (from, to) = (&self.nodes[j], &self.nodes[j + 1]);
        let mut bodies = [[0.0; 2]; 4];
        for i in 0..4 {
            for k in 0..2 {
                bodies[i][k] = from.bodies[i][k] + u * (to.bodies[i][k] - from.bodies[i][k]);
            }
        }
        Configuration { bodies }
    }

    /// Minimum pair separation over the whole path (exact per segment).
    pub fn min_pair_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..self.num_segments() {
            let (from, to) = (&self.nodes[j], &self.nodes[j + 1]);
            for &(i, k) in &PAIRS {
                let a = from.bodies[i][0] - from.bodies[k][0];
                let c = from.bodies[i][1] - from.bodies[k][1];
                let b = to.bodies[i][0] - to.bodies[k][0] - a;
                let d = to.bodies[i][1] - to.bodies[k][1] - c;
                best = best.min(segment_min_distance(a, b, c, d));
            }
        }
        best
    }

    /// Reverses traversal direction on the same time grid.
    pub fn reversed(&self) -> Self {
        let t0 = self.times[0];
        let t1 = *self.times.last().unwrap();
        let mut times: Vec<f64> = self.times.iter().rev().map(|&t| t0 + t1 - t).collect();
        // kill float noise at the grid ends
        times[0] = t0;
        *times.last_mut().unwrap() = t1;
        let nodes = self.nodes.iter().rev().cloned().collect();
        Self { times, nodes }
    }
}

/// Kinetic action of one linear segment: (1/(2 dt)) sum_i |to_i - from_i|^2.
pub fn segment_kinetic(
    from: &Configuration,
    to: &Configuration,
    dt: f64,
) -> Result<f64, ActionError> {
    if dt <= 0.0 {
        return Err(ActionError::InvalidInput(format!("dt = {dt} must be > 0")));
    }
    let mut s = 0.0;
    for i in 0..4 {
        let dx = to.bodies[i][0] - from.bodies[i][0];
        let dy = to.bodies[i][1] - from.bodies[i][1];
        s += dx * dx + dy * dy;
    }
    Ok(s / (2.0 * dt))
}

/// Action of a path split into its parts. `pairwise` holds the six binary
/// actions A_ij = int 1/2 |qdot_i - qdot_j|^2 + 4/|q_i - q_j| dt in PAIRS
/// order; on center-of-mass paths total = (1/4) sum A_ij.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionBreakdown {
    pub total: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub pairwise: [f64; 6],
}

/// Exact action of a polyline path: kinetic from the per-segment constant
/// velocities, potential from the closed-form line integral per segment and
/// pair (coefficient 1 per pair in K+U; the pairwise ledger uses relative
/// velocities and coefficient 4).
pub fn polyline_action(path: &PolylinePath) -> Result<ActionBreakdown, ActionError> {
    let mut kinetic = 0.0;
    let mut potential = 0.0;
    let mut pairwise = [0.0; 6];
    for j in 0..path.num_segments() {
        let dt = path.times[j + 1] - path.times[j];
        let (from, to) = (&path.nodes[j], &path.nodes[j + 1]);
        kinetic += segment_kinetic(from, to, dt)?;
        for (pidx, &(i, k)) in PAIRS.iter().enumerate() {
            let a = from.bodies[i][0] - from.bodies[k][0];
            let c = from.bodies[i][1] - from.bodies[k][1];
            let b = to.bodies[i][0] - to.bodies[k][0] - a;
            let d = to.bodies[i][1] - to.bodies[k][1] - c;
            let integral = line_inverse_distance_integral(a, b, c, d).map_err(|e| match e {
                IntegralError::Collision => ActionError::Collision {
                    segment: j,
                    pair: (i, k),
                },
                IntegralError::Degenerate => ActionError::Degenerate {
                    segment: j,
                    pair: (i, k),
                },
            })?;
            potential += dt * integral;
            // relative kinetic + coefficient-4 potential for the binary ledger
            let rel_k = (b * b + d * d) / (2.0 * dt);
            pairwise[pidx] += rel_k + 4.0 * dt * integral;
        }
    }
    Ok(ActionBreakdown {
        total: kinetic + potential,
        kinetic,
        potential,
        pairwise,
    })
}

fn potential_at(from: &Configuration, to: &Configuration, u: f64) -> f64 {
    let mut s = 0.0;
    for &(i, k) in &PAIRS {
        let ax = from.bodies[i][0] - from.bodies[k][0];
        let ay = from.bodies[i][1] - from.bodies[k][1];
        let bx = to.bodies[i][0] - to.bodies[k][0] - ax;
        let by = to.bodies[i][1] - to.bodies[k][1] - ay;
        s += 1.0 / (ax + bx * u).hypot(ay + by * u);
    }
    s
}

fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let r = adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Some(l + r)
}

/// Independent check of the closed form: adaptive Simpson quadrature of the
/// potential (the kinetic part is exact for polylines) to absolute
/// tolerance `tol`.
pub fn action_quadrature_oracle(path: &PolylinePath, tol: f64) -> Result<f64, ActionError> {
    let nseg = path.num_segments();
    let mut total = 0.0;
    for j in 0..nseg {
        let dt = path.times[j + 1] - path.times[j];
        let (from, to) = (&path.nodes[j], &path.nodes[j + 1]);
        total += segment_kinetic(from, to, dt)?;
        let f = |u: f64| potential_at(from, to, u);
        let (fa, fm, fb) = (f(0.0), f(0.5), f(1.0));
        let whole = (fa + 4.0 * fm + fb) / 6.0;
        let integral = adaptive_simpson(
            &f,
            0.0,
            1.0,
            fa,
            fm,
            fb,
            whole,
            tol / (dt * nseg as f64),
            ORACLE_DEPTH_LIMIT,
        )
        .ok_or(ActionError::NonConvergence { segment: j })?;
        total += dt * integral;
    }
    Ok(total)
}
