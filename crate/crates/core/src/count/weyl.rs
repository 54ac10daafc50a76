use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{count_negative, CountError, GammaMoments, ModeCutPolicy, ZERO_TOL};
use crate::lb_spectrum::SpectralBasis;
use crate::surface::{GammaField, GammaKind, Surface, SurfaceName};

/// Exponent window for the log-log fit of `N_scalar`.
pub const EXPONENT_WINDOW: (f64, f64) = (1.9, 2.1);

/// Smallest `r_max / r_min` for which the exponent gate applies.
pub const EXPONENT_SPAN: f64 = 3.0;

/// `(1 / 4 pi) int (gamma0^2 - 1) dS`
///
/// Constant and affine (above-one) damping on the unit sphere use the closed
/// form `gamma0^2 - 1` averaged with `<z> = 0`, `<z^2> = 1/3`.
pub fn weyl_coefficient(surface: &Surface, field: &GammaField) -> Result<f64, CountError> {
    field.range_on(surface)?;
    if let Surface::Analytic(s) = surface {
        if s.name() == SurfaceName::UnitSphere {
            match *field.kind() {
                GammaKind::Constant { value } => {
                    let g = value.max(1.0 / value);
                    return Ok(g * g - 1.0);
                }
                GammaKind::Affine { offset, slope, .. } if offset - slope.abs() > 1.0 => {
                    return Ok(offset * offset - 1.0 + slope * slope / 3.0);
                }
                _ => {}
            }
        }
    }
    let integral = surface.integrate(|site| {
        let g = field.gamma0(&site).unwrap_or(f64::NAN);
        g * g - 1.0
    });
    if !integral.is_finite() {
        return Err(CountError::Invalid("damping could not be evaluated at every quadrature site".into()));
    }
    Ok(integral / (4.0 * PI))
}

/// `W(r) = weyl_coefficient * r^2`
pub fn weyl_prediction(surface: &Surface, field: &GammaField, r: f64) -> Result<f64, CountError> {
    if !(r > 0.0) {
        return Err(CountError::Invalid(format!("r = {r} must be positive")));
    }
    Ok(weyl_coefficient(surface, field)? * r * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountPoint {
    pub r: f64,
    pub n_scalar: usize,
    pub n_system: usize,
    pub weyl: f64,
    pub borderline: usize,
    pub mode_cut: usize,
    /// Largest retained Laplace-Beltrami eigenvalue.
    pub top_lambda: f64,
    pub recount_cut: usize,
    pub recount: usize,
    /// The recount had the full enlarged basis available.
    pub headroom: bool,
}

impl CountPoint {
    pub fn stable(&self) -> bool {
        self.recount == self.n_scalar
    }
}

/// Log-log fit `N ~ a r^p` and the least-squares coefficient of `N / r^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    /// `p`, fitted over the upper half of the grid; `NaN` with fewer than two
    /// usable points.
    pub exponent: f64,
    pub log_prefactor: f64,
    pub exponent_points: usize,
    /// `sum N r^2 / sum r^4` over the whole grid.
    pub coefficient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Multiplicity {
    Scalar,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplicitySupport {
    /// Fitted coefficient of `N_scalar` over the Weyl coefficient.
    pub scalar_ratio: f64,
    pub system_ratio: f64,
    /// Whichever count lies closer to the prediction.
    pub supported: Multiplicity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationDiagnostics {
    pub max_mode_cut: usize,
    pub max_recount_delta: usize,
    pub all_headroom: bool,
    pub trusted_horizon: f64,
    /// Some retained eigenvalue exceeds the trusted horizon.
    pub untrusted_modes_used: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGates {
    pub nondecreasing: bool,
    pub truncation_stable: bool,
    /// `None` when the grid spans less than [`EXPONENT_SPAN`].
    pub exponent_in_window: Option<bool>,
}

impl ScanGates {
    pub fn passed(&self) -> bool {
        self.nondecreasing && self.truncation_stable && self.exponent_in_window != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub points: Vec<CountPoint>,
    pub weyl_coefficient: f64,
    pub fit: PowerFit,
    pub multiplicity: MultiplicitySupport,
    pub truncation: TruncationDiagnostics,
    pub gates: ScanGates,
}

/// Least-squares fits of `(r, N)` pairs.
pub fn power_fit(r: &[f64], n: &[usize]) -> PowerFit {
    let (num, den) = r
        .iter()
        .zip(n)
        .fold((0.0, 0.0), |(a, b), (&r, &n)| (a + n as f64 * r * r, b + r * r * r * r));
    let coefficient = if den > 0.0 { num / den } else { f64::NAN };
    let start = r.len() / 2;
    let pts: Vec<(f64, f64)> = r[start..]
        .iter()
        .zip(&n[start..])
        .filter(|(_, &n)| n > 0)
        .map(|(&r, &n)| (libm::log(r), libm::log(n as f64)))
        .collect();
    let m = pts.len() as f64;
    let (mut exponent, mut log_prefactor) = (f64::NAN, f64::NAN);
    if pts.len() >= 2 {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx > 0.0 {
            exponent = sxy / sxx;
            log_prefactor = my - exponent * mx;
        }
    }
    PowerFit { exponent, log_prefactor, exponent_points: pts.len(), coefficient }
}

/// A validated scan whose grid points can be evaluated independently (and in
/// parallel) before being assembled by [`ScanPlan::finish`].
#[derive(Debug, Clone)]
pub struct ScanPlan<'a> {
    moments: GammaMoments<'a>,
    policy: ModeCutPolicy,
    grid: Vec<f64>,
    weyl_coefficient: f64,
}

impl<'a> ScanPlan<'a> {
    pub fn new(
        basis: &'a SpectralBasis,
        field: &GammaField,
        surface: &Surface,
        grid: &[f64],
        policy: ModeCutPolicy,
    ) -> Result<Self, CountError> {
        if grid.is_empty() {
            return Err(CountError::Invalid("empty r grid".into()));
        }
        if !grid.iter().all(|r| *r > 0.0 && r.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CountError::Invalid("r grid must be positive and strictly ascending".into()));
        }
        let moments = GammaMoments::new(basis, field, surface)?;
        // the largest r needs the most modes
        moments.mode_cut(1.0 / grid[grid.len() - 1], policy)?;
        let weyl_coefficient = weyl_coefficient(surface, field)?;
        Ok(Self { moments, policy, grid: grid.to_vec(), weyl_coefficient })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn moments(&self) -> &GammaMoments<'a> {
        &self.moments
    }

    pub fn weyl_coefficient(&self) -> f64 {
        self.weyl_coefficient
    }

    pub fn point(&self, r: f64) -> Result<CountPoint, CountError> {
        let h = 1.0 / r;
        let op = self.moments.operator(h, self.policy)?;
        let c = count_negative(&op, ZERO_TOL)?;
        let (recount_cut, headroom) = self.moments.stability_cut(op.mode_cut);
        let recount = if recount_cut == op.mode_cut {
            c.negative
        } else {
            count_negative(&self.moments.operator_with_cut(h, recount_cut)?, ZERO_TOL)?.negative
        };
        Ok(CountPoint {
            r,
            n_scalar: c.negative,
            n_system: 2 * c.negative,
            weyl: self.weyl_coefficient * r * r,
            borderline: c.borderline,
            mode_cut: op.mode_cut,
            top_lambda: self.moments.basis().eigenvalues()[op.mode_cut - 1],
            recount_cut,
            recount,
            headroom,
        })
    }

    pub fn finish(&self, points: Vec<CountPoint>) -> CountReport {
        let r: Vec<f64> = points.iter().map(|p| p.r).collect();
        let n: Vec<usize> = points.iter().map(|p| p.n_scalar).collect();
        let fit = power_fit(&r, &n);
        let scalar_ratio = fit.coefficient / self.weyl_coefficient;
        let system_ratio = 2.0 * scalar_ratio;
        let supported =
            if (system_ratio - 1.0).abs() < (scalar_ratio - 1.0).abs() { Multiplicity::System } else { Multiplicity::Scalar };
        let horizon = self.moments.basis().trusted_horizon();
        let truncation = TruncationDiagnostics {
            max_mode_cut: points.iter().map(|p| p.mode_cut).max().unwrap_or(0),
            max_recount_delta: points.iter().map(|p| p.recount.abs_diff(p.n_scalar)).max().unwrap_or(0),
            all_headroom: points.iter().all(|p| p.headroom),
            trusted_horizon: horizon,
            untrusted_modes_used: points.iter().any(|p| p.top_lambda > horizon),
        };
        let span = match (r.first(), r.last()) {
            (Some(a), Some(b)) => b / a,
            _ => 1.0,
        };
        let gates = ScanGates {
            nondecreasing: n.windows(2).all(|w| w[0] <= w[1]),
            truncation_stable: points.iter().all(CountPoint::stable),
            exponent_in_window: (span >= EXPONENT_SPAN)
                .then(|| fit.exponent >= EXPONENT_WINDOW.0 && fit.exponent <= EXPONENT_WINDOW.1),
        };
        CountReport {
            points,
            weyl_coefficient: self.weyl_coefficient,
            fit,
            multiplicity: MultiplicitySupport { scalar_ratio, system_ratio, supported },
            truncation,
            gates,
        }
    }
}

/// Sequential scan over `grid`.
pub fn scan(
    basis: &SpectralBasis,
    field: &GammaField,
    surface: &Surface,
    grid: &[f64],
    policy: ModeCutPolicy,
) -> Result<CountReport, CountError> {
    let plan = ScanPlan::new(basis, field, surface, grid, policy)?;
    let points = plan.grid().iter().map(|&r| plan.point(r)).collect::<Result<Vec<_>, _>>()?;
    Ok(plan.finish(points))
}
