//! Seeded randomized verification of the symbol identities.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use super::transport::{ccross, cnorm};
use super::{
    build_u, diagonalized_expected, diagonalized_symbol, eigenstructure_b, principal_m, principal_m1, rho, script_b,
    spectral_parameter, transport_principal, CotangentSample, SymbolError, TransportSide,
};
use crate::geom::{cross, dot, norm, sub, Vec3};
use crate::linalg::{mat3_dist, mat3_identity, mat3_mul, mat3_mul_vec, mat3_transpose, Mat3};
use crate::surface::{AnalyticSurface, Chart, SurfaceName};

pub const VERIFY_SEED: u64 = 42;
pub const VERIFY_SAMPLES: usize = 1000;

/// Every identity must hold to this residual.
pub const VERIFY_TOL: f64 = 1e-8;

const FD_JACOBIAN_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: String,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceVerification {
    pub surface: SurfaceName,
    pub samples: usize,
    /// Samples whose point also lies in the other chart.
    pub overlap_samples: usize,
    pub identities: Vec<IdentityResidual>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples_per_surface: usize,
    pub tolerance: f64,
    pub surfaces: Vec<SurfaceVerification>,
}

impl VerifyReport {
    pub fn max_residual(&self) -> f64 {
        self.surfaces.iter().flat_map(|s| &s.identities).map(|i| i.max_residual).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() < self.tolerance
    }
}

struct Uniform(ChaCha8Rng);

impl Uniform {
    fn next(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

#[derive(Default)]
struct Tally {
    names: Vec<&'static str>,
    values: Vec<f64>,
}

impl Tally {
    fn record(&mut self, name: &'static str, residual: f64) {
        let r = if residual.is_nan() { f64::INFINITY } else { residual };
        match self.names.iter().position(|n| *n == name) {
            Some(i) => self.values[i] = self.values[i].max(r),
            None => {
                self.names.push(name);
                self.values.push(r);
            }
        }
    }

    fn finish(self) -> Vec<IdentityResidual> {
        self.names
            .into_iter()
            .zip(self.values)
            .map(|(n, v)| IdentityResidual { name: n.to_string(), max_residual: v })
            .collect()
    }
}

fn cmat_dist_real(a: &[[Complex64; 3]; 3], b: &Mat3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += (a[i][j] - Complex64::new(b[i][j], 0.0)).norm_sqr();
        }
    }
    libm::sqrt(s)
}

/// Jacobian `d x~ / d x` of the transition from `from` to `to` by central
/// differences, with the periodic longitude unwrapped.
fn transition_jacobian(from: &Chart, to: &Chart, x: [f64; 2]) -> Option<[[f64; 2]; 2]> {
    let mut jac = [[0.0; 2]; 2];
    for k in 0..2 {
        let mut xp = x;
        let mut xm = x;
        xp[k] += FD_JACOBIAN_STEP;
        xm[k] -= FD_JACOBIAN_STEP;
        let (p, m) = (to.locate(&from.point(&xp))?, to.locate(&from.point(&xm))?);
        for i in 0..2 {
            let mut d = p[i] - m[i];
            if i == 1 {
                d -= 2.0 * PI * libm::round(d / (2.0 * PI));
            }
            jac[i][k] = d / (2.0 * FD_JACOBIAN_STEP);
        }
    }
    Some(jac)
}

fn random_sample(surface: &AnalyticSurface, rng: &mut Uniform) -> Result<(usize, CotangentSample), SymbolError> {
    loop {
        let ci = if rng.next(0.0, 1.0) < 0.5 { 0 } else { 1 };
        let chart = &surface.charts()[ci];
        let d = chart.domain();
        let x = [rng.next(d.lo[0] + 0.05, d.hi[0] - 0.05), rng.next(d.lo[1], d.hi[1])];
        let xi = [rng.next(-3.0, 3.0), rng.next(-3.0, 3.0)];
        let sample = CotangentSample::new(chart, x, xi)?;
        if sample.r0() > 1e-6 {
            return Ok((ci, sample));
        }
    }
}

fn check_sample(
    surface: &AnalyticSurface,
    ci: usize,
    sample: &CotangentSample,
    rng: &mut Uniform,
    tally: &mut Tally,
) -> Result<bool, SymbolError> {
    let nu = sample.nu();
    let beta = sample.beta();
    let r0 = sample.r0();
    let unit = 1.0 + r0;

    tally.record("nu_beta_orthogonality", dot(&nu, &beta).abs() / libm::sqrt(unit));
    tally.record("r0_inverse_metric", (r0 - sample.xi_norm() * sample.xi_norm()).abs() / unit);
    let doubled = sample.scaled(2.0)?;
    tally.record("beta_homogeneity", norm(&sub(&doubled.beta(), &crate::geom::scale(&beta, 2.0))) / libm::sqrt(unit));

    let bm = script_b(sample);
    let mut worst: f64 = 0.0;
    for (mu, v) in eigenstructure_b(sample)? {
        let bv = mat3_mul_vec(&bm, &v);
        worst = worst.max(norm(&sub(&bv, &crate::geom::scale(&v, mu))));
    }
    tally.record("b_eigenstructure", worst / unit);
    tally.record("b_trace", (bm[0][0] + bm[1][1] + bm[2][2] - r0).abs() / unit);
    tally.record("b_annihilates_nu_cross_beta", norm(&mat3_mul_vec(&bm, &cross(&nu, &beta))) / unit);

    let u = build_u(sample)?;
    let ut = mat3_transpose(&u);
    tally.record("u_orthogonality", mat3_dist(&mat3_mul(&ut, &u), &mat3_identity()));
    let mut diag_b = [[0.0; 3]; 3];
    diag_b[2][2] = r0;
    tally.record("u_diagonalizes_b", mat3_dist(&mat3_mul(&mat3_mul(&ut, &bm), &u), &diag_b) / unit);

    let h = rng.next(0.01, 1.0);
    let gamma0 = rng.next(0.25, 4.0);
    let d = diagonalized_symbol(sample, h, gamma0)?;
    let want = diagonalized_expected(r0, h, gamma0);
    let mut dm = [[0.0; 3]; 3];
    for k in 0..3 {
        dm[k][k] = want[k];
    }
    tally.record("diagonalized_symbol", mat3_dist(&d, &dm));

    let minus_i = Complex64::new(0.0, -1.0);
    let m = principal_m(sample, minus_i)?;
    let s = libm::sqrt(unit);
    let mut closed = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            closed[i][j] = if i == j { s } else { 0.0 } - bm[i][j] / s;
        }
    }
    let mut neg_m = m;
    neg_m.iter_mut().flatten().for_each(|v| *v = -*v);
    tally.record("minus_m_at_minus_i", cmat_dist_real(&neg_m, &closed) / s);
    let m1 = principal_m1(sample, minus_i)?;
    tally.record("m1_equals_minus_m_at_minus_i", cmat_dist_real(&m1, &closed) / s);

    let t = rng.next(-1.0, 1.0) * h * h;
    let z = spectral_parameter(t);
    let r = rho(z, r0)?;
    tally.record("rho_square", (r * r - (z * z - r0)).norm() / unit);
    let floor = (0.5 * s).min(1.0);
    tally.record("rho_imaginary_floor", (floor - r.im).max(0.0));
    let mz = principal_m(sample, z)?;
    let mut asym: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            asym = asym.max((mz[i][j] - mz[j][i]).norm());
        }
    }
    tally.record("m_complex_symmetry", asym);

    let chart = &surface.charts()[ci];
    let [t0, t1] = chart.tangents(&sample.x());
    let (c0, c1) = (rng.next(-1.0, 1.0), rng.next(-1.0, 1.0));
    let g: Vec3 = [c0 * t0[0] + c1 * t1[0], c0 * t0[1] + c1 * t1[1], c0 * t0[2] + c1 * t1[2]];
    let nu_c = [Complex64::new(nu[0], 0.0), Complex64::new(nu[1], 0.0), Complex64::new(nu[2], 0.0)];
    let scale_g = 1.0 + norm(&g);
    for (side, name) in [(TransportSide::Electric, "transport_electric"), (TransportSide::Magnetic, "transport_magnetic")] {
        let tp = transport_principal(sample, z, g, side)?;
        tally.record(name, tp.residual / (scale_g * s));
        // the closed form of nu x (other amplitude) is m (resp. m_1) applied to nu x g
        let mm = match side {
            TransportSide::Electric => principal_m(sample, z)?,
            TransportSide::Magnetic => principal_m1(sample, z)?,
        };
        let nu_g = cross(&nu, &g);
        let mut applied = [Complex64::new(0.0, 0.0); 3];
        for i in 0..3 {
            for j in 0..3 {
                applied[i] += mm[i][j] * nu_g[j];
            }
        }
        let other = match side {
            TransportSide::Electric => tp.b00,
            TransportSide::Magnetic => tp.a00,
        };
        let direct = ccross(&nu_c, &other);
        let diff = [direct[0] - applied[0], direct[1] - applied[1], direct[2] - applied[2]];
        tally.record(
            match side {
                TransportSide::Electric => "transport_electric_symbol_m",
                TransportSide::Magnetic => "transport_magnetic_symbol_m1",
            },
            cnorm(&diff) / (scale_g * s),
        );
    }

    // chart invariance: same point and covector expressed in the other chart
    let other = &surface.charts()[1 - ci];
    let p = chart.point(&sample.x());
    let Some(xt) = other.locate(&p) else { return Ok(false) };
    if !(xt[0] > other.domain().lo[0] + 0.05 && xt[0] < other.domain().hi[0] - 0.05) {
        return Ok(false);
    }
    let Some(jac) = transition_jacobian(chart, other, sample.x()) else { return Ok(false) };
    // xi = J^T xi~
    let xi = sample.xi();
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    let xt_cov = [(jac[1][1] * xi[0] - jac[1][0] * xi[1]) / det, (-jac[0][1] * xi[0] + jac[0][0] * xi[1]) / det];
    let moved = CotangentSample::new(other, xt, xt_cov)?;
    tally.record("chart_invariance_r0", (moved.r0() - r0).abs() / unit);
    tally.record("chart_invariance_beta", norm(&sub(&moved.beta(), &beta)) / libm::sqrt(unit));
    tally.record("chart_invariance_normal", norm(&sub(&moved.nu(), &nu)));
    Ok(true)
}

/// Runs the identity suite on `samples` seeded random cotangent samples of
/// each surface.
pub fn verify_symbols(surfaces: &[AnalyticSurface], samples: usize, seed: u64) -> Result<VerifyReport, SymbolError> {
    let mut out = Vec::with_capacity(surfaces.len());
    for (k, surface) in surfaces.iter().enumerate() {
        let mut rng = Uniform(ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64)));
        let mut tally = Tally::default();
        let mut overlap = 0;
        for _ in 0..samples {
            let (ci, sample) = random_sample(surface, &mut rng)?;
            if check_sample(surface, ci, &sample, &mut rng, &mut tally)? {
                overlap += 1;
            }
        }
        out.push(SurfaceVerification {
            surface: surface.name(),
            samples,
            overlap_samples: overlap,
            identities: tally.finish(),
        });
    }
    Ok(VerifyReport { seed, samples_per_surface: samples, tolerance: VERIFY_TOL, surfaces: out })
}
