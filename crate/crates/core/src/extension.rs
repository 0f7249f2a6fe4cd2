//! Extension of a collision-free path on [0,1] to the whole line by the
//! reflection/rotation formulas, period classification, C1 junction checks
//! and validation against the Newtonian equations of motion.

use crate::action::PolylinePath;
use crate::geometry::{rotate_row, rotation_radians, AngleKind, Configuration, RotationAngle};
use crate::testpaths::Variant;
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

/// Default minimum endpoint pair separation for extension.
pub const ENDPOINT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ExtensionError {
    #[error("endpoint collision at t = {t}: min pair distance {dist:e}")]
    EndpointCollision { t: f64, dist: f64 },
    #[error("invalid window [{0}, {1}]")]
    BadWindow(f64, f64),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PeriodClass {
    Periodic { period: f64 },
    QuasiPeriodic,
}

/// theta = p/q pi rational gives a periodic extension with period 8q (first
/// family) or 4q (second family); an irrational angle never closes.
pub fn classify_period(variant: Variant, theta: RotationAngle) -> PeriodClass {
    match theta.kind {
        AngleKind::Rational { p: _, q } => {
            let block = match variant {
                Variant::E1 => 8.0,
                Variant::E2 => 4.0,
            };
            PeriodClass::Periodic {
                period: block * q as f64,
            }
        }
        AngleKind::Irrational => PeriodClass::QuasiPeriodic,
    }
}

/// Evaluator of the extended trajectory. The base path lives on [0,1]; one
/// block spans [0,8] (first family) or [0,4] (second), and successive
/// blocks differ by a rigid rotation.
pub struct Extender {
    base: PolylinePath,
    variant: Variant,
    theta: f64,
}

const B: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];

fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn permuted_negated(
    c: &Configuration,
    perm: [usize; 4],
    negate: bool,
    m: &[[f64; 2]; 2],
) -> Configuration {
    let mut bodies = [[0.0; 2]; 4];
    for (i, &src) in perm.iter().enumerate() {
        let mut row = c.bodies[src];
        if negate {
            row = [-row[0], -row[1]];
        }
        bodies[i] = rotate_row(row, m);
    }
    Configuration { bodies }
}

impl Extender {
    pub fn new(
        base: PolylinePath,
        variant: Variant,
        theta: RotationAngle,
        endpoint_tol: f64,
    ) -> Result<Self, ExtensionError> {
        for t in [base.start_time(), base.end_time()] {
            let (dist, _) = base.eval(t).min_pair_distance();
            if dist <= endpoint_tol {
                return Err(ExtensionError::EndpointCollision { t, dist });
            }
        }
        Ok(Self {
            base,
            variant,
            theta: theta.radians(),
        })
    }

    pub fn block_len(&self) -> f64 {
        match self.variant {
            Variant::E1 => 8.0,
            Variant::E2 => 4.0,
        }
    }

    /// Evaluates the extension at any real time.
    pub fn eval(&self, t: f64) -> Configuration {
        let block = self.block_len();
        let k = (t / block).floor();
        let tr = t - block * k;
        let inside = self.eval_block(tr);
        if k == 0.0 {
            return inside;
        }
        inside.rotated(&rotation_radians(k * block * self.theta))
    }

    // one block, tr in [0, block_len)
    fn eval_block(&self, tr: f64) -> Configuration {
        let th = self.theta;
        match self.variant {
            Variant::E1 => {
                if tr <= 1.0 {
                    self.base.eval(tr)
                } else if tr <= 2.0 {
                    // (-q4, -q3, -q2, -q1)(2 - t) B R(2 theta)
                    let m = mat_mul(&B, &rotation_radians(2.0 * th));
                    permuted_negated(&self.eval_block(2.0 - tr), [3, 2, 1, 0], true, &m)
                } else if tr <= 4.0 {
                    // (-q3, -q4, -q2, -q1)(t - 2) R(2 theta)
                    let m = rotation_radians(2.0 * th);
                    permuted_negated(&self.eval_block(tr - 2.0), [2, 3, 1, 0], true, &m)
                } else {
                    // (q2, q1, q4, q3)(t - 4) R(4 theta)
                    let m = rotation_radians(4.0 * th);
                    permuted_negated(&self.eval_block(tr - 4.0), [1, 0, 3, 2], false, &m)
                }
            }
            Variant::E2 => {
                if tr <= 1.0 {
                    self.base.eval(tr)
                } else if tr <= 2.0 {
                    // (q2, q1, q4, q3)(2 - t) B R(2 theta)
                    let m = mat_mul(&B, &rotation_radians(2.0 * th));
                    permuted_negated(&self.eval_block(2.0 - tr), [1, 0, 3, 2], false, &m)
                } else {
                    // (q2, q1, q3, q4)(t - 2) R(2 theta)
                    let m = rotation_radians(2.0 * th);
                    permuted_negated(&self.eval_block(tr - 2.0), [1, 0, 2, 3], false, &m)
                }
            }
        }
    }

    /// The start-side mirror extension to [-1, 0]: q_i(-t) equals the
    /// x-axis reflection of q_i(t) with bodies 3 and 4 swapped. Useful as
    /// an independent check of the backward reflection identity.
    pub fn backward_reflection(&self, t: f64) -> Configuration {
        let c = self.base.eval(-t);
        permuted_negated(&c, [0, 1, 3, 2], false, &B)
    }

    /// Junction times of the extension blocks intersected with a window.
    pub fn junctions(&self, t_min: f64, t_max: f64) -> Vec<f64> {
        let block = self.block_len();
        let offsets: &[f64] = match self.variant {
            Variant::E1 => &[0.0, 1.0, 2.0, 4.0],
            Variant::E2 => &[0.0, 1.0, 2.0],
        };
        let mut out = Vec::new();
        let mut k = (t_min / block).floor();
        while k * block <= t_max {
            for &o in offsets {
                let t = k * block + o;
                if t >= t_min && t <= t_max {
                    out.push(t);
                }
            }
            k += 1.0;
        }
        out
    }
}

/// A sampled extension over a time window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtendedTrajectory {
    pub variant: Variant,
    pub theta: RotationAngle,
    pub classification: PeriodClass,
    pub junctions: Vec<f64>,
    /// (t, configuration) samples, uniform in t.
    pub samples: Vec<(f64, Configuration)>,
}

/// Samples the extension of `base` over `[t_min, t_max]` with
/// `samples_per_unit` points per unit time (default 100 when 0 is passed).
pub fn extend(
    base: &PolylinePath,
    variant: Variant,
    theta: RotationAngle,
    t_min: f64,
    t_max: f64,
    samples_per_unit: usize,
) -> Result<ExtendedTrajectory, ExtensionError> {
    if !(t_max > t_min) {
        return Err(ExtensionError::BadWindow(t_min, t_max));
    }
    let density = if samples_per_unit == 0 { 100 } else { samples_per_unit };
    let ext = Extender::new(base.clone(), variant, theta, ENDPOINT_TOL)?;
    let count = (((t_max - t_min) * density as f64).ceil() as usize).max(1);
    let h = (t_max - t_min) / count as f64;
    let samples = (0..=count)
        .map(|i| {
            let t = t_min + i as f64 * h;
            (t, ext.eval(t))
        })
        .collect();
    Ok(ExtendedTrajectory {
        variant,
        theta,
        classification: classify_period(variant, theta),
        junctions: ext.junctions(t_min, t_max),
        samples,
    })
}

/// Per-junction velocity jumps from second-order one-sided stencils with
/// step `h` on either side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JunctionReport {
    pub jumps: Vec<(f64, f64)>,
    pub max_jump: f64,
    pub pass: bool,
}

pub fn c1_junction_check(ext: &Extender, junctions: &[f64], h: f64, tol: f64) -> JunctionReport {
    let mut jumps = Vec::with_capacity(junctions.len());
    let mut max_jump = 0.0f64;
    for &tj in junctions {
        let v = |sgn: f64| -> [[f64; 2]; 4] {
            let q0 = ext.eval(tj);
            let q1 = ext.eval(tj + sgn * h);
            let q2 = ext.eval(tj + sgn * 2.0 * h);
            std::array::from_fn(|i| {
                std::array::from_fn(|k| {
                    sgn * (-3.0 * q0.bodies[i][k] + 4.0 * q1.bodies[i][k] - q2.bodies[i][k])
                        / (2.0 * h)
                })
            })
        };
        let (vp, vm) = (v(1.0), v(-1.0));
        let mut jump = 0.0f64;
        for i in 0..4 {
            let dx = vp[i][0] - vm[i][0];
            let dy = vp[i][1] - vm[i][1];
            jump = jump.max(dx.hypot(dy));
        }
        jumps.push((tj, jump));
        max_jump = max_jump.max(jump);
    }
    JunctionReport {
        jumps,
        max_jump,
        pass: max_jump <= tol,
    }
}

/// Gravitational accelerations (equal unit masses, G = 1).
pub fn accelerations(c: &Configuration) -> [[f64; 2]; 4] {
    let mut acc = [[0.0; 2]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let dx = c.bodies[j][0] - c.bodies[i][0];
            let dy = c.bodies[j][1] - c.bodies[i][1];
            let r = dx.hypot(dy);
            let r3 = r * r * r;
            acc[i][0] += dx / r3;
            acc[i][1] += dy / r3;
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NewtonResidual {
    pub max: f64,
    pub rms: f64,
}

/// Compares central second differences of the sampled trajectory against
/// the Newtonian accelerations at interior uniform samples.
pub fn newton_residual(ext: &Extender, t_min: f64, t_max: f64, sample_count: usize) -> NewtonResidual {
    assert!(sample_count >= 3, "need at least 3 samples");
    let h = (t_max - t_min) / (sample_count - 1) as f64;
    let samples: Vec<Configuration> = (0..sample_count)
        .map(|i| ext.eval(t_min + i as f64 * h))
        .collect();
    let mut max = 0.0f64;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for w in samples.windows(3) {
        let acc = accelerations(&w[1]);
        for i in 0..4 {
            let ax = (w[0].bodies[i][0] - 2.0 * w[1].bodies[i][0] + w[2].bodies[i][0]) / (h * h);
            let ay = (w[0].bodies[i][1] - 2.0 * w[1].bodies[i][1] + w[2].bodies[i][1]) / (h * h);
            let r = (ax - acc[i][0]).hypot(ay - acc[i][1]);
            max = max.max(r);
            sum_sq += r * r;
            count += 1;
        }
    }
    NewtonResidual {
        max,
        rms: (sum_sq / count as f64).sqrt(),
    }
}

/// Writes the sampled trajectory as CSV with comment-header metadata.
pub fn write_trajectory_csv<W: Write>(traj: &ExtendedTrajectory, mut w: W) -> std::io::Result<()> {
    let variant = match traj.variant {
        Variant::E1 => "e1",
        Variant::E2 => "e2",
    };
    writeln!(w, "# variant: {variant}")?;
    match traj.theta.kind {
        AngleKind::Rational { p, q } => writeln!(w, "# theta: {p}/{q} pi")?,
        AngleKind::Irrational => writeln!(w, "# theta: {} rad (irrational)", traj.theta.radians())?,
    }
    match traj.classification {
        PeriodClass::Periodic { period } => writeln!(w, "# classification: periodic, period {period}")?,
        PeriodClass::QuasiPeriodic => writeln!(w, "# classification: quasi-periodic")?,
    }
    writeln!(w, "t,q1x,q1y,q2x,q2y,q3x,q3y,q4x,q4y")?;
    for (t, c) in &traj.samples {
        write!(w, "{t}")?;
        for b in &c.bodies {
            write!(w, ",{},{}", b[0], b[1])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{boundary_rows_unrotated, rotation, BoundarySide};
    use crate::minimizer::DiscretePathVariable;

    /// A base path whose endpoints sit exactly on the boundary families.
    fn synthetic_base(variant: Variant, theta: RotationAngle) -> PolylinePath {
        let n = 10;
        let var = DiscretePathVariable {
            variant,
            theta,
            n,
            start: [2.0, 0.8, 1.2],
            end: match variant {
                Variant::E1 => [0.6, 2.4, 1.4],
                Variant::E2 => [2.1, 0.5, 2.4],
            },
            interior: {
                let a = boundary_rows_unrotated(BoundarySide::Start, 2.0, 0.8, 1.2);
                let side = match variant {
                    Variant::E1 => BoundarySide::EndE1,
                    Variant::E2 => BoundarySide::EndE2,
                };
                let b_rows = boundary_rows_unrotated(
                    side,
                    match variant {
                        Variant::E1 => 0.6,
                        Variant::E2 => 2.1,
                    },
                    match variant {
                        Variant::E1 => 2.4,
                        Variant::E2 => 0.5,
                    },
                    match variant {
                        Variant::E1 => 1.4,
                        Variant::E2 => 2.4,
                    },
                );
                let r = rotation(theta);
                (1..n)
                    .map(|j| {
                        let u = j as f64 / n as f64;
                        std::array::from_fn(|body| {
                            let end = rotate_row(b_rows[body], &r);
                            [
                                a[body][0] + u * (end[0] - a[body][0]) + 0.05 * (u * (1.0 - u)),
                                a[body][1] + u * (end[1] - a[body][1]),
                            ]
                        })
                    })
                    .collect()
            },
        };
        var.to_polyline()
    }

    #[test]
    fn classification_examples() {
        let th = RotationAngle::rational(1, 20).unwrap();
        assert_eq!(
            classify_period(Variant::E1, th),
            PeriodClass::Periodic { period: 160.0 }
        );
        assert_eq!(
            classify_period(Variant::E2, th),
            PeriodClass::Periodic { period: 80.0 }
        );
        assert_eq!(
            classify_period(Variant::E2, RotationAngle::irrational(0.01)),
            PeriodClass::QuasiPeriodic
        );
    }

    #[test]
    fn e1_block_relation() {
        let theta = RotationAngle::rational(1, 20).unwrap();
        let base = synthetic_base(Variant::E1, theta);
        let ext = Extender::new(base, Variant::E1, theta, ENDPOINT_TOL).unwrap();
        let r8 = rotation_radians(8.0 * theta.radians());
        for i in 0..40 {
            let t = -7.3 + i as f64 * 0.61;
            let a = ext.eval(t + 8.0);
            let b = ext.eval(t).rotated(&r8);
            for k in 0..4 {
                assert!((a.bodies[k][0] - b.bodies[k][0]).abs() < 1e-10, "t = {t}");
                assert!((a.bodies[k][1] - b.bodies[k][1]).abs() < 1e-10, "t = {t}");
            }
        }
    }

    #[test]
    fn e2_block_relation() {
        let theta = RotationAngle::rational(3, 100).unwrap();
        let base = synthetic_base(Variant::E2, theta);
        let ext = Extender::new(base, Variant::E2, theta, ENDPOINT_TOL).unwrap();
        let r4 = rotation_radians(4.0 * theta.radians());
        let a = ext.eval(4.0);
        let b = ext.eval(0.0).rotated(&r4);
        for k in 0..4 {
            assert!((a.bodies[k][0] - b.bodies[k][0]).abs() < 1e-12);
            assert!((a.bodies[k][1] - b.bodies[k][1]).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_zero_is_mirror_periodic() {
        let theta = RotationAngle::zero();
        let base = synthetic_base(Variant::E1, theta);
        let ext = Extender::new(base, Variant::E1, theta, ENDPOINT_TOL).unwrap();
        for i in 0..100 {
            let t = i as f64 * 0.173;
            let a = ext.eval(t + 8.0);
            let b = ext.eval(t);
            for k in 0..4 {
                assert!((a.bodies[k][0] - b.bodies[k][0]).abs() < 1e-10);
                assert!((a.bodies[k][1] - b.bodies[k][1]).abs() < 1e-10);
            }
        }
        assert_eq!(
            classify_period(Variant::E1, theta),
            PeriodClass::Periodic { period: 8.0 }
        );
    }

    #[test]
    fn e1_position_continuity_at_junctions() {
        let theta = RotationAngle::rational(1, 20).unwrap();
        let base = synthetic_base(Variant::E1, theta);
        let ext = Extender::new(base, Variant::E1, theta, ENDPOINT_TOL).unwrap();
        for tj in [1.0, 2.0, 4.0, 8.0] {
            let eps = 1e-9;
            let a = ext.eval(tj - eps);
            let b = ext.eval(tj + eps);
            for k in 0..4 {
                assert!(
                    (a.bodies[k][0] - b.bodies[k][0]).abs() < 1e-6,
                    "junction {tj} body {k}"
                );
                assert!((a.bodies[k][1] - b.bodies[k][1]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn endpoint_collision_detected() {
        let c0 = Configuration::from_free3([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]);
        let c1 = Configuration::from_free3([[-1.0, 0.0], [1.0, 0.0], [0.5, 1.0]]);
        let base = PolylinePath::new(vec![0.0, 1.0], vec![c0, c1]).unwrap();
        let theta = RotationAngle::zero();
        assert!(matches!(
            Extender::new(base, Variant::E1, theta, ENDPOINT_TOL),
            Err(ExtensionError::EndpointCollision { .. })
        ));
    }

    #[test]
    fn square_acceleration_reference() {
        let sq = Configuration::new([[-1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [1.0, -1.0]]).unwrap();
        let acc = accelerations(&sq);
        // body at (1,1) accelerates toward the origin with components
        // -(1/4 + sqrt(2)/16) ~= -0.33839 each
        let expect = -(0.25 + std::f64::consts::SQRT_2 / 16.0);
        assert!((acc[2][0] - expect).abs() < 1e-12);
        assert!((acc[2][1] - expect).abs() < 1e-12);
    }

    #[test]
    fn static_config_newton_residual_equals_accel_norm() {
        let sq = Configuration::new([[-1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [1.0, -1.0]]).unwrap();
        let base = PolylinePath::new(vec![0.0, 1.0], vec![sq, sq]).unwrap();
        let theta = RotationAngle::zero();
        let ext = Extender::new(base, Variant::E1, theta, ENDPOINT_TOL).unwrap();
        let res = newton_residual(&ext, 0.1, 0.9, 9);
        let acc = accelerations(&sq);
        let amax = acc
            .iter()
            .map(|a| a[0].hypot(a[1]))
            .fold(0.0f64, f64::max);
        assert!((res.max - amax).abs() < 1e-12);
    }

    #[test]
    fn backward_reflection_matches_family_symmetry() {
        let theta = RotationAngle::rational(1, 20).unwrap();
        let base = synthetic_base(Variant::E1, theta);
        let ext = Extender::new(base.clone(), Variant::E1, theta, ENDPOINT_TOL).unwrap();
        let c = ext.backward_reflection(-0.3);
        let fwd = base.eval(0.3);
        // mirror in x, bodies 3 and 4 swapped
        assert!((c.bodies[0][0] - fwd.bodies[0][0]).abs() < 1e-14);
        assert!((c.bodies[0][1] + fwd.bodies[0][1]).abs() < 1e-14);
        assert!((c.bodies[2][0] - fwd.bodies[3][0]).abs() < 1e-14);
        assert!((c.bodies[2][1] + fwd.bodies[3][1]).abs() < 1e-14);
    }

    #[test]
    fn csv_export_has_metadata() {
        let theta = RotationAngle::rational(1, 20).unwrap();
        let base = synthetic_base(Variant::E2, theta);
        let traj = extend(&base, Variant::E2, theta, 0.0, 4.0, 10).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# variant: e2"));
        assert!(text.contains("# theta: 1/20 pi"));
        assert!(text.contains("period 80"));
        assert!(text.contains("t,q1x,q1y,q2x,q2y,q3x,q3y,q4x,q4y"));
    }
}
