use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{ConstantsCEps, CountError, GammaMoments, ModeCutPolicy, Structure};
use crate::linalg::{symmetric_eigen, DMat};

/// Minimum `|<v_-, v_+>|` for two eigenvectors to belong to the same branch.
const BRANCH_OVERLAP: f64 = 0.8;

/// `(1 + C - eps) s^2 - 2 C gamma0 s + (C gamma0^2 - 1)`, the per-mode form of
/// the coercivity estimate with `s = sqrt(1 + h^2 lambda)`.
pub fn inequality_margin(k: &ConstantsCEps, s: f64, gamma0: f64) -> f64 {
    (1.0 + k.big_c - k.eps) * s * s - 2.0 * k.big_c * gamma0 * s + (k.big_c * gamma0 * gamma0 - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalitySample {
    pub lambda: f64,
    pub h: f64,
    pub gamma0: f64,
}

impl InequalitySample {
    pub fn s(&self) -> f64 {
        libm::sqrt(1.0 + self.h * self.h * self.lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub constants: ConstantsCEps,
    pub samples: usize,
    pub min_margin: f64,
    /// Smallest margin among samples with `lambda = 0`, if any.
    pub min_margin_at_s1: Option<f64>,
    pub violations: usize,
    pub worst: Option<InequalitySample>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.min_margin_at_s1.map_or(true, |m| m >= 0.5 * self.constants.eps)
    }
}

/// Seeded samples: `lambda` is zero for every tenth sample and otherwise
/// log-uniform in `[1e-3, 1e6]`, `h` uniform in `(0, h0]`, `gamma0` uniform
/// in `[c0, c1]`.
pub fn inequality_samples(k: &ConstantsCEps, n: usize, h0: f64, seed: u64) -> Vec<InequalitySample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    (0..n)
        .map(|i| {
            let lambda = if i % 10 == 0 { 0.0 } else { libm::pow(10.0, -3.0 + 9.0 * unit()) };
            let h = h0 * (1.0 - unit());
            let gamma0 = k.c0 + (k.c1 - k.c0) * unit();
            InequalitySample { lambda, h, gamma0 }
        })
        .collect()
}

pub fn inequality_check(k: &ConstantsCEps, samples: &[InequalitySample]) -> InequalityReport {
    let mut report = InequalityReport {
        constants: *k,
        samples: samples.len(),
        min_margin: f64::INFINITY,
        min_margin_at_s1: None,
        violations: 0,
        worst: None,
    };
    for sample in samples {
        let m = inequality_margin(k, sample.s(), sample.gamma0);
        if !(m >= 0.0) {
            report.violations += 1;
        }
        if m < report.min_margin {
            report.min_margin = m;
            report.worst = Some(*sample);
        }
        if sample.lambda == 0.0 {
            report.min_margin_at_s1 = Some(report.min_margin_at_s1.map_or(m, |x: f64| x.min(m)));
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeViolation {
    pub h: f64,
    pub mu: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub h_values: Vec<f64>,
    /// Relative half-step of the central difference.
    pub eta: f64,
    pub mode_cut: usize,
    pub delta: f64,
    pub eps: f64,
    /// Branch samples with `mu in [-delta, delta]`, counted with multiplicity.
    pub in_window: usize,
    /// Branches near the window whose eigenvector could not be matched.
    pub skipped: usize,
    pub min_slope: f64,
    /// Empirical `C0*`.
    pub max_slope: f64,
    /// A priori bound `c1 + delta` on `h dmu/dh` in the window.
    pub analytic_bound: f64,
    pub violations: Vec<SlopeViolation>,
}

impl MonotonicityReport {
    pub fn lower_bound(&self) -> f64 {
        0.25 * self.eps
    }

    pub fn upper_bound(&self) -> f64 {
        4.0 * self.max_slope
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.skipped == 0
    }
}

fn sectors(structure: Structure) -> Vec<(usize, DMat)> {
    match structure {
        Structure::Diagonal(d) => d.into_iter().map(|x| (1, DMat::from_fn(1, 1, |_, _| x))).collect(),
        Structure::Dense(a) => alloc::vec![(1, a)],
        Structure::Blocks(b) => b.into_iter().map(|b| (b.multiplicity, b.matrix)).collect(),
    }
}

/// Central-difference slopes `h dmu/dh` of the eigenvalue branches of `Q(h)`
/// that lie in `[-delta, delta]`, for each `h` in `h_values`.
///
/// The mode cut is fixed at the value required by the smallest `h`.
/// Branches are matched across `h (1 - eta)` and `h (1 + eta)` by eigenvector
/// overlap.
pub fn monotonicity_probe(
    moments: &GammaMoments,
    h_values: &[f64],
    policy: ModeCutPolicy,
    eta: f64,
) -> Result<MonotonicityReport, CountError> {
    if h_values.is_empty() || !(eta > 0.0 && eta < 0.5) {
        return Err(CountError::Invalid(alloc::format!("need h values and eta in (0, 0.5), got eta = {eta}")));
    }
    let k = ConstantsCEps::from_range(moments.range())?;
    let h_min = h_values.iter().copied().fold(f64::INFINITY, f64::min);
    let mode_cut = moments.mode_cut(h_min * (1.0 - eta), policy)?;
    let mut report = MonotonicityReport {
        h_values: h_values.to_vec(),
        eta,
        mode_cut,
        delta: k.delta,
        eps: k.eps,
        in_window: 0,
        skipped: 0,
        min_slope: f64::INFINITY,
        max_slope: f64::NEG_INFINITY,
        analytic_bound: k.c1 + k.delta,
        violations: Vec::new(),
    };
    let mut slopes = Vec::new();
    for &h in h_values {
        let lo = sectors(moments.operator_with_cut(h * (1.0 - eta), mode_cut)?.structure);
        let hi = sectors(moments.operator_with_cut(h * (1.0 + eta), mode_cut)?.structure);
        for ((mult, a), (_, b)) in lo.into_iter().zip(hi) {
            let ea = symmetric_eigen(&a)?;
            let eb = symmetric_eigen(&b)?;
            let n = a.nrows();
            for i in 0..n {
                let (mu_a, va) = (ea.values[i], ea.vectors.column(i));
                let near = |mu: f64| mu.abs() <= 2.0 * k.delta;
                let mut best = (0usize, 0.0f64);
                for j in 0..n {
                    let ov: f64 = va.iter().zip(eb.vectors.column(j)).map(|(x, y)| x * y).sum();
                    if ov.abs() > best.1 {
                        best = (j, ov.abs());
                    }
                }
                if best.1 <= BRANCH_OVERLAP {
                    if near(mu_a) {
                        report.skipped += mult;
                    }
                    continue;
                }
                let mu_b = eb.values[best.0];
                let mu = 0.5 * (mu_a + mu_b);
                if mu.abs() > k.delta {
                    continue;
                }
                let slope = (mu_b - mu_a) / (2.0 * eta);
                report.in_window += mult;
                report.min_slope = report.min_slope.min(slope);
                report.max_slope = report.max_slope.max(slope);
                slopes.push((h, mu, slope));
            }
        }
    }
    let upper = 4.0 * report.max_slope;
    for (h, mu, slope) in slopes {
        if !(slope >= report.lower_bound() && slope <= upper && slope <= report.analytic_bound * (1.0 + 1e-6)) {
            report.violations.push(SlopeViolation { h, mu, slope });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lb_spectrum::exact_sphere_spectrum;
    use crate::surface::{AnalyticSurface, GammaField, Surface};
    use proptest::prelude::*;

    #[test]
    fn margin_equals_eps_at_s_one_and_c0() {
        let k = ConstantsCEps::new(1.5, 2.5).unwrap();
        assert!((inequality_margin(&k, 1.0, 1.5) - k.eps).abs() < 1e-15);
        let k2 = ConstantsCEps::new(2.0, 2.0).unwrap();
        assert!((inequality_margin(&k2, 1.0, 2.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn margin_at_s_two_for_constant_two() {
        let k = ConstantsCEps::new(2.0, 2.0).unwrap();
        assert!((inequality_margin(&k, 2.0, 2.0) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn margin_grows_like_leading_coefficient() {
        let k = ConstantsCEps::new(1.5, 5.0).unwrap();
        let s = 1e4;
        let lead = (1.0 + k.big_c - k.eps) * s * s;
        assert!((inequality_margin(&k, s, 3.0) / lead - 1.0).abs() < 1e-3);
    }

    #[test]
    fn sampled_check_for_standard_constants() {
        for g in [1.5, 2.0, 5.0] {
            let k = ConstantsCEps::new(g, g).unwrap();
            let samples = inequality_samples(&k, 10_000, 1.0, 42);
            let r = inequality_check(&k, &samples);
            assert_eq!(r.violations, 0);
            assert!((r.min_margin_at_s1.unwrap() - k.eps).abs() < 1e-14);
            assert!(r.passed());
        }
    }

    #[test]
    fn constant_damping_slope_closed_form() {
        // gamma0 = 2: the branch lambda = 6 crosses zero at h^2 = 1/2
        let basis = exact_sphere_spectrum(20);
        let field = GammaField::constant(2.0).unwrap();
        let surface = Surface::Analytic(AnalyticSurface::unit_sphere());
        let m = GammaMoments::new(&basis, &field, &surface).unwrap();
        let h = libm::sqrt(0.5);
        let r = monotonicity_probe(&m, &[h], ModeCutPolicy::default(), 1e-4).unwrap();
        assert_eq!(r.in_window, 5);
        assert!((r.min_slope - 1.5).abs() < 1e-6 && (r.max_slope - 1.5).abs() < 1e-6);
        assert!(r.passed());
    }

    #[test]
    fn variable_sphere_slopes_are_positive() {
        let basis = exact_sphere_spectrum(60);
        let field = GammaField::affine(2.0, 0.5, [0.0, 0.0, 1.0]).unwrap();
        let surface = Surface::Analytic(AnalyticSurface::unit_sphere());
        let m = GammaMoments::new(&basis, &field, &surface).unwrap();
        let hs: Vec<f64> = (6..=10).map(|r| 1.0 / r as f64).collect();
        let r = monotonicity_probe(&m, &hs, ModeCutPolicy::default(), 1e-3).unwrap();
        assert!(r.in_window > 0);
        assert!(r.min_slope > 0.0);
        assert!(r.max_slope <= r.analytic_bound);
        assert!(r.passed(), "{:?}", r.violations);
    }

    proptest! {
        #[test]
        fn margin_is_at_least_eps_on_admissible_range(
            c0 in 1.01f64..6.0, spread in 0.0f64..4.0, t in 0.0f64..1.0, s in 1.0f64..1e3,
        ) {
            let k = ConstantsCEps::new(c0, c0 + spread).unwrap();
            let g = k.c0 + t * (k.c1 - k.c0);
            prop_assert!(inequality_margin(&k, s, g) >= k.eps * (1.0 - 1e-9));
        }
    }
}
