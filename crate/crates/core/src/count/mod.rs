//! Galerkin models of the reduced operator `Q(h) = sqrt(1 - h^2 Delta) - gamma0`
//! and counting of its negative eigenvalues at `h = 1/r`.
//!
//! The operator is truncated to the lowest `mode_cut` Laplace-Beltrami modes.
//! Its Weyl prediction is `W(r) = (r^2 / 4 pi) int (gamma0^2 - 1) dS`.

mod galerkin;
mod probe;
mod weyl;

pub use galerkin::{build_q, count_negative, GalerkinOperator, GammaMoments, NegativeCount, Structure};
pub use probe::{
    inequality_check, inequality_margin, inequality_samples, monotonicity_probe, InequalityReport, MonotonicityReport,
    SlopeViolation,
};
pub use weyl::{
    power_fit, scan, weyl_coefficient, weyl_prediction, CountPoint, CountReport, Multiplicity, MultiplicitySupport,
    PowerFit, ScanGates, ScanPlan, TruncationDiagnostics,
};

use alloc::string::String;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lb_spectrum::SpectrumError;
use crate::linalg::LinalgError;
use crate::surface::{GammaRange, SurfaceError};

/// Eigenvalues with `|mu| <= ZERO_TOL` are borderline and never counted.
pub const ZERO_TOL: f64 = 1e-12;

/// Factor applied to `mode_cut` for the truncation-stability recount.
pub const STABILITY_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CountError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(
        "insufficient spectrum: need eigenvalues up to {lambda_needed:.6} (about {required_modes} modes), \
         basis has {available} modes up to {top:.6}"
    )]
    InsufficientSpectrum { required_modes: usize, available: usize, lambda_needed: f64, top: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Constants of the coercivity estimate for `Q(h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsCEps {
    /// `min gamma0`
    pub c0: f64,
    /// `max gamma0`
    pub c1: f64,
    /// `C = 1 / c1^2`
    pub big_c: f64,
    /// `eps = (C / 2) (c0 - 1)^2`
    pub eps: f64,
    /// `delta = (c0 - 1) / 2`
    pub delta: f64,
}

impl ConstantsCEps {
    pub fn new(c0: f64, c1: f64) -> Result<Self, CountError> {
        if !(c0 > 1.0 && c1 >= c0 && c1.is_finite()) {
            return Err(CountError::Invalid(alloc::format!("need 1 < c0 <= c1, got c0 = {c0}, c1 = {c1}")));
        }
        let big_c = 1.0 / (c1 * c1);
        let eps = 0.5 * big_c * (c0 - 1.0) * (c0 - 1.0);
        Ok(Self { c0, c1, big_c, eps, delta: 0.5 * (c0 - 1.0) })
    }

    pub fn from_range(range: &GammaRange) -> Result<Self, CountError> {
        Self::new(range.c0, range.c1)
    }
}

/// How many modes to retain at a given `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModeCutPolicy {
    /// Keep modes until the retained spectrum reaches `factor * lambda*`,
    /// `lambda* = (c1^2 - 1) / h^2` being the ellipticity threshold.
    ThresholdMultiple { factor: f64 },
    /// Keep a fixed number of modes (rounded up to a complete degree shell or
    /// eigenvalue cluster).
    Fixed { modes: usize },
}

impl Default for ModeCutPolicy {
    fn default() -> Self {
        ModeCutPolicy::ThresholdMultiple { factor: 2.0 }
    }
}

/// `lambda* = (c1^2 - 1) / h^2`
pub fn ellipticity_threshold(c1: f64, h: f64) -> f64 {
    (c1 * c1 - 1.0) / (h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_for_the_variable_example() {
        let k = ConstantsCEps::new(1.5, 2.5).unwrap();
        assert!((k.big_c - 0.16).abs() < 1e-15);
        assert!((k.eps - 0.02).abs() < 1e-15);
        assert!((k.delta - 0.25).abs() < 1e-15);
    }

    #[test]
    fn constants_for_constant_two() {
        let k = ConstantsCEps::new(2.0, 2.0).unwrap();
        assert_eq!(k.big_c, 0.25);
        assert_eq!(k.eps, 0.125);
        assert!(k.eps < 0.5 && k.delta > 0.0);
    }

    #[test]
    fn constants_reject_bad_ranges() {
        assert!(ConstantsCEps::new(1.0, 2.0).is_err());
        assert!(ConstantsCEps::new(2.0, 1.5).is_err());
    }
}
