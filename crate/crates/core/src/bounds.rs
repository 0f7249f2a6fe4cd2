//! Keplerian action estimates and the collision lower bounds g1, g2,
//! together with every per-case bound entering their derivation.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("theta = {0} outside the validity interval (0, pi/10]")]
    ThetaOutOfRange(f64),
    #[error("invalid Kepler parameter {name} = {value}")]
    BadKeplerParam { name: &'static str, value: f64 },
}

/// Parameters of the two-body (Keplerian) action lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeplerParams {
    /// Reduced-mass coefficient.
    pub mu: f64,
    /// Potential coefficient.
    pub alpha: f64,
    /// Angle subtended by the endpoints, in (0, pi].
    pub theta: f64,
    /// Duration.
    pub t: f64,
}

/// (3/2) (mu alpha^2 theta^2 T)^(1/3); for the collision class the angle is
/// replaced by pi.
pub fn kepler_lower_bound(p: &KeplerParams, collision: bool) -> Result<f64, BoundsError> {
    for (name, value) in [("mu", p.mu), ("alpha", p.alpha), ("T", p.t)] {
        if !(value > 0.0) {
            return Err(BoundsError::BadKeplerParam { name, value });
        }
    }
    if !(p.theta > 0.0 && p.theta <= PI) {
        return Err(BoundsError::BadKeplerParam {
            name: "theta",
            value: p.theta,
        });
    }
    let theta = if collision { PI } else { p.theta };
    Ok(1.5 * (p.mu * p.alpha * p.alpha * theta * theta * p.t).cbrt())
}

/// Lower bound on the action of any path in the A ≥ (6/4) kepler(pi)
/// total-collision class (all six pairs colliding).
pub fn total_collision_bound() -> f64 {
    1.5 * 1.5 * (16.0 * PI * PI).cbrt()
}

// x^(2/3) via cbrt squared: well-defined and accurate down to x = 0.
fn p23(x: f64) -> f64 {
    let c = x.cbrt();
    c * c
}

const K: f64 = 2.5198420997897463295; // 16^(1/3)

fn check_domain(theta: f64) -> Result<(), BoundsError> {
    if theta > 0.0 && theta <= PI / 10.0 + 1e-15 {
        Ok(())
    } else {
        Err(BoundsError::ThetaOutOfRange(theta))
    }
}

/// Collision lower bound for the first end family:
/// g1(theta) = (3/8) 16^(1/3) [(2 pi^2)^(1/3) + 2 (2 theta)^(2/3)].
pub fn g1(theta: f64) -> Result<f64, BoundsError> {
    check_domain(theta)?;
    Ok(0.375 * K * ((2.0 * PI * PI).cbrt() + 2.0 * p23(2.0 * theta)))
}

/// Collision lower bound for the second end family:
/// g2(theta) = (3/8) 16^(1/3) [pi^(2/3) + theta^(2/3) + 2 (2 theta)^(2/3)].
pub fn g2(theta: f64) -> Result<f64, BoundsError> {
    check_domain(theta)?;
    Ok(0.375 * K * (p23(PI) + p23(theta) + 2.0 * p23(2.0 * theta)))
}

/// The individual collision-case estimates behind g1 (five cases) and g2
/// (four cases).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseId {
    E1Case1,
    E1Case2,
    E1Case3,
    E1Case4,
    E1Case5,
    E2Case1,
    E2Case2,
    E2Case3,
    E2Case4,
}

pub const E1_CASES: [CaseId; 5] = [
    CaseId::E1Case1,
    CaseId::E1Case2,
    CaseId::E1Case3,
    CaseId::E1Case4,
    CaseId::E1Case5,
];

pub const E2_CASES: [CaseId; 4] = [
    CaseId::E2Case1,
    CaseId::E2Case2,
    CaseId::E2Case3,
    CaseId::E2Case4,
];

/// Per-case lower bound at `theta`, using the corrected 3/8 coefficient for
/// the second family's Case 2 (see `case_bound_with`).
pub fn case_bound(case: CaseId, theta: f64) -> Result<f64, BoundsError> {
    case_bound_with(case, theta, false)
}

/// As `case_bound`; with `printed_e2_case2 = true` the second family's
/// Case 2 uses the coefficient 3/2 as printed in the source derivation.
/// That printed value drops a factor 1/4 from the surrounding binary
/// decomposition (it would exceed the certified minimum action), so the
/// default repairs it to 3/8. The flag exists purely for audit.
pub fn case_bound_with(
    case: CaseId,
    theta: f64,
    printed_e2_case2: bool,
) -> Result<f64, BoundsError> {
    check_domain(theta)?;
    let two_pi2_cbrt = (2.0 * PI * PI).cbrt();
    Ok(match case {
        CaseId::E1Case1 => {
            (3.0 / 16.0)
                * K
                * (2.0 * two_pi2_cbrt
                    + p23(PI / 2.0 + 2.0 * theta)
                    + p23(PI / 2.0 + 3.0 * theta)
                    + p23(theta))
        }
        CaseId::E1Case2 => {
            (3.0 / 16.0)
                * K
                * (2.0 * two_pi2_cbrt
                    + p23(PI / 2.0 + 2.0 * theta)
                    + p23(PI / 2.0 - 3.0 * theta)
                    + p23(PI - theta))
        }
        CaseId::E1Case3 => g1(theta)?,
        CaseId::E1Case4 => 0.375 * K * (two_pi2_cbrt + 2.0 * p23(theta) + p23(2.0 * theta)),
        CaseId::E1Case5 => 0.75 * K * p23(PI),
        CaseId::E2Case1 | CaseId::E2Case3 => g2(theta)?,
        CaseId::E2Case2 => {
            let coef = if printed_e2_case2 { 1.5 } else { 0.375 };
            coef * K * (p23(4.0 * theta) + p23(PI / 2.0 + theta) + p23(PI))
        }
        CaseId::E2Case4 => {
            0.375 * K * (p23(PI) + p23(PI / 2.0 + theta) + 2.0 * p23(2.0 * theta))
        }
    })
}
