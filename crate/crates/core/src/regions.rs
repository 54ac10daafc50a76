//! Complex-plane regions that contain the dissipative eigenvalues, and the
//! eigenvalue bound for constant damping on the ball.
//!
//! All sets are closed in their inequality constraints: boundary points are
//! members.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("invalid region parameters: {0}")]
    InvalidParams(&'static str),
    #[error("effective damping must exceed 1, got {0}")]
    Domain(f64),
}

/// Constants of the three regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    /// Real-part threshold of the polynomial neighbourhood, `>= 1`.
    pub c0: f64,
    /// Width constant of the polynomial neighbourhood.
    pub c2: f64,
    pub c_eps: f64,
    pub eps: f64,
    pub c_m: f64,
    pub m: f64,
}

impl Default for RegionParams {
    fn default() -> Self {
        Self { c0: 2.0, c2: 1.0, c_eps: 1.0, eps: 0.1, c_m: 1.0, m: 2.0 }
    }
}

impl RegionParams {
    pub fn validate(&self) -> Result<(), RegionError> {
        if !(self.c2 > 0.0) {
            return Err(RegionError::InvalidParams("C2 must be positive"));
        }
        if !(self.c0 >= 1.0) {
            return Err(RegionError::InvalidParams("C0 must be at least 1"));
        }
        if self.c0 < 2.0 * self.c2 {
            return Err(RegionError::InvalidParams("C0 must be at least 2 C2"));
        }
        if !(self.c_eps > 0.0) || !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(RegionError::InvalidParams("need C_eps > 0 and 0 < eps < 1/2"));
        }
        if !(self.c_m > 0.0) || !(self.m >= 2.0) {
            return Err(RegionError::InvalidParams("need C_M > 0 and M >= 2"));
        }
        Ok(())
    }
}

/// `|Im z| <= C2 (1 + |Re z|)^-2` and `Re z <= -C0`.
pub fn in_lambda(z: Complex64, p: &RegionParams) -> bool {
    z.re <= -p.c0 && z.im.abs() <= p.c2 / ((1.0 + z.re.abs()) * (1.0 + z.re.abs()))
}

/// `|Re z| <= C_eps (1 + |Im z|^(1/2 + eps))` and `Re z < 0`.
pub fn in_lambda_eps(z: Complex64, p: &RegionParams) -> bool {
    z.re < 0.0 && z.re.abs() <= p.c_eps * (1.0 + libm::pow(z.im.abs(), 0.5 + p.eps))
}

/// `|Im z| <= C_M (1 + |Re z|)^-M` and `Re z < 0`.
pub fn in_r_m(z: Complex64, p: &RegionParams) -> bool {
    z.re < 0.0 && z.im.abs() <= p.c_m * libm::pow(1.0 + z.re.abs(), -p.m)
}

/// `1 / max{gamma0 - 1, sqrt(gamma0 - 1)}`: the distance from the origin
/// beyond which all but one negative eigenvalue lie for constant damping.
pub fn bound_c0(gamma0: f64) -> Result<f64, RegionError> {
    if !(gamma0 > 1.0) || !gamma0.is_finite() {
        return Err(RegionError::Domain(gamma0));
    }
    let t = gamma0 - 1.0;
    Ok(1.0 / t.max(libm::sqrt(t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub lambda: bool,
    pub lambda_eps: bool,
    pub r_m: bool,
}

pub fn classify(z: Complex64, p: &RegionParams) -> Membership {
    Membership { lambda: in_lambda(z, p), lambda_eps: in_lambda_eps(z, p), r_m: in_r_m(z, p) }
}
