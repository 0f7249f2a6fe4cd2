//! Boundary configuration families, rotations, center-of-mass space and
//! collision predicates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for the center-of-mass invariant.
pub const COM_TOL: f64 = 1e-12;

/// Default distance below which a pair counts as collided.
pub const COLLISION_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("center of mass off origin by {0:e} (tolerance {COM_TOL:e})")]
    CenterOfMass(f64),
    #[error("boundary parameter {name} = {value} must be non-negative")]
    NegativeParam { name: &'static str, value: f64 },
    #[error("rotation angle denominator must be >= 1, got {0}")]
    BadDenominator(i64),
}

/// A planar four-body configuration with zero center of mass: four row
/// vectors (x, y), one per body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub bodies: [[f64; 2]; 4],
}

impl Configuration {
    /// Builds a configuration, checking the center-of-mass invariant.
    pub fn new(bodies: [[f64; 2]; 4]) -> Result<Self, GeometryError> {
        let sx: f64 = bodies.iter().map(|b| b[0]).sum();
        let sy: f64 = bodies.iter().map(|b| b[1]).sum();
        let err = sx.hypot(sy);
        if err > COM_TOL {
            return Err(GeometryError::CenterOfMass(err));
        }
        Ok(Self { bodies })
    }

    /// Builds from the three free bodies; q4 closes the center of mass
    /// exactly by construction.
    pub fn from_free3(q123: [[f64; 2]; 3]) -> Self {
        let q4 = [
            -q123[0][0] - q123[1][0] - q123[2][0],
            -q123[0][1] - q123[1][1] - q123[2][1],
        ];
        Self {
            bodies: [q123[0], q123[1], q123[2], q4],
        }
    }

    /// Right-multiplies every row by the matrix `r`.
    pub fn rotated(&self, r: &[[f64; 2]; 2]) -> Self {
        let mut bodies = self.bodies;
        for b in &mut bodies {
            *b = rotate_row(*b, r);
        }
        Self { bodies }
    }

    /// Minimum pairwise distance and the (0-based) achieving pair, ties
    /// broken by lexicographically smallest pair.
    pub fn min_pair_distance(&self) -> (f64, (usize, usize)) {
        let mut best = (f64::INFINITY, (0, 1));
        for i in 0..4 {
            for j in (i + 1)..4 {
                let dx = self.bodies[i][0] - self.bodies[j][0];
                let dy = self.bodies[i][1] - self.bodies[j][1];
                let d = dx.hypot(dy);
                if d < best.0 {
                    best = (d, (i, j));
                }
            }
        }
        best
    }

    pub fn is_collision_free(&self, tol: f64) -> bool {
        self.min_pair_distance().0 > tol
    }
}

/// Applies the row-vector convention: `row * r`.
pub fn rotate_row(row: [f64; 2], r: &[[f64; 2]; 2]) -> [f64; 2] {
    [
        row[0] * r[0][0] + row[1] * r[1][0],
        row[0] * r[0][1] + row[1] * r[1][1],
    ]
}

/// A rotation angle carried as an exact rational multiple of pi (so the
/// periodic / quasi-periodic dichotomy stays decidable), or an explicit
/// irrational marker with its real value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AngleKind {
    /// theta = p/q * pi, gcd(|p|, q) = 1, q >= 1.
    Rational { p: i64, q: i64 },
    /// Angle known (or declared) not to be a rational multiple of pi.
    Irrational,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationAngle {
    pub kind: AngleKind,
    radians: f64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl RotationAngle {
    /// theta = p/q * pi, reduced to lowest terms.
    pub fn rational(p: i64, q: i64) -> Result<Self, GeometryError> {
        if q < 1 {
            return Err(GeometryError::BadDenominator(q));
        }
        let g = if p == 0 { q } else { gcd(p, q) };
        let (p, q) = (p / g, q / g);
        Ok(Self {
            kind: AngleKind::Rational { p, q },
            radians: p as f64 * std::f64::consts::PI / q as f64,
        })
    }

    pub fn zero() -> Self {
        Self::rational(0, 1).unwrap()
    }

    /// Marks the value as an irrational multiple of pi.
    pub fn irrational(radians: f64) -> Self {
        Self {
            kind: AngleKind::Irrational,
            radians,
        }
    }

    pub fn radians(&self) -> f64 {
        self.radians
    }

    /// Exact comparison against r/s * pi when self is rational; falls back
    /// to the float value for irrational angles.
    pub fn cmp_frac(&self, r: i64, s: i64) -> std::cmp::Ordering {
        match self.kind {
            AngleKind::Rational { p, q } => {
                (p as i128 * s as i128).cmp(&(r as i128 * q as i128))
            }
            AngleKind::Irrational => self
                .radians
                .partial_cmp(&(r as f64 * std::f64::consts::PI / s as f64))
                .expect("non-finite angle"),
        }
    }
}

/// Which boundary family a parameter triple describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundarySide {
    Start,
    EndE1,
    EndE2,
}

/// The scalar triple (a, b, c) of a boundary configuration. `theta` only
/// matters for the End sides; b and c must be non-negative exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    pub side: BoundarySide,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub theta: RotationAngle,
}

/// R(theta) = [[cos, sin], [-sin, cos]]; configurations are row vectors
/// right-multiplied by this matrix.
pub fn rotation(theta: RotationAngle) -> [[f64; 2]; 2] {
    rotation_radians(theta.radians())
}

pub fn rotation_radians(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, s], [-s, c]]
}

/// Builds the boundary configuration for the given parameters:
/// Start -> ((-a-c, 0), (-a, 0), ((2a+c)/2, b), ((2a+c)/2, -b));
/// EndE1 -> ((-b,-a), (-c,a), (c,a), (b,-a)) * R(theta);
/// EndE2 -> ((-a,-b), (-a,b), (a,c), (a,-c)) * R(theta).
/// The rows sum to the origin exactly by construction.
pub fn build_boundary(params: &BoundaryParams) -> Result<Configuration, GeometryError> {
    if params.b < 0.0 {
        return Err(GeometryError::NegativeParam {
            name: "b",
            value: params.b,
        });
    }
    if params.c < 0.0 {
        return Err(GeometryError::NegativeParam {
            name: "c",
            value: params.c,
        });
    }
    let (a, b, c) = (params.a, params.b, params.c);
    let rows = boundary_rows_unrotated(params.side, a, b, c);
    let config = Configuration { bodies: rows };
    Ok(match params.side {
        BoundarySide::Start => config,
        BoundarySide::EndE1 | BoundarySide::EndE2 => config.rotated(&rotation(params.theta)),
    })
}

/// The family rows before the end-side rotation is applied.
pub fn boundary_rows_unrotated(side: BoundarySide, a: f64, b: f64, c: f64) -> [[f64; 2]; 4] {
    match side {
        BoundarySide::Start => [
            [-a - c, 0.0],
            [-a, 0.0],
            [(2.0 * a + c) / 2.0, b],
            [(2.0 * a + c) / 2.0, -b],
        ],
        BoundarySide::EndE1 => [[-b, -a], [-c, a], [c, a], [b, -a]],
        BoundarySide::EndE2 => [[-a, -b], [-a, b], [a, c], [a, -c]],
    }
}
