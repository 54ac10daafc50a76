//! Principal-symbol calculus on the cotangent bundle of a surface.
//!
//! A [`CotangentSample`] fixes a boundary point `x'` of a chart, a covector
//! `xi'` and the derived quantities `nu` (outer normal), `beta` (the covector
//! lifted to a tangent 3-vector through the dual frame) and `r0 = <beta, beta>`.
//! Everything is evaluated on the boundary (`x_1 = 0`).

mod transport;
mod verify;

pub use transport::{transport_principal, TransportPrincipal, TransportSide};
pub use verify::{verify_symbols, IdentityResidual, SurfaceVerification, VerifyReport, VERIFY_SAMPLES, VERIFY_SEED};

use num_complex::Complex64;
use thiserror::Error;

use crate::geom::{cross, dot, norm, outer, scale, Vec3};
use crate::linalg::{mat3_mul, mat3_transpose, Mat3};
use crate::surface::{Chart, SurfaceError};

pub type CVec3 = [Complex64; 3];
pub type CMat3 = [[Complex64; 3]; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolError {
    #[error(transparent)]
    Chart(#[from] SurfaceError),
    #[error("xi' = 0: the direction b = beta / sqrt(r0) is undefined")]
    ZeroCovector,
    #[error("branch of rho is ambiguous: z^2 - r0 = {re} + {im}i lies on [0, inf)")]
    Branch { re: f64, im: f64 },
    #[error("data vector is not tangential: <nu, g> = {0:e}")]
    NonTangential(f64),
    #[error("invalid frame: {0}")]
    InvalidFrame(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CotangentSample {
    chart: Option<Chart>,
    x: [f64; 2],
    xi: [f64; 2],
    nu: Vec3,
    beta: Vec3,
    r0: f64,
    xi_norm: f64,
}

impl CotangentSample {
    /// Sample at chart parameters `x` with dual variables `xi`.
    pub fn new(chart: &Chart, x: [f64; 2], xi: [f64; 2]) -> Result<Self, SymbolError> {
        let nu = chart.normal(&x)?;
        let [t0, t1] = chart.tangents(&x);
        let g = chart.metric(&x);
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let ginv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
        // dual frame e^k = g^{kj} t_j, so <e^k, t_j> = delta_kj and <e^k, nu> = 0
        let dual = |k: usize| -> Vec3 {
            let (a, b) = (ginv[k][0], ginv[k][1]);
            [a * t0[0] + b * t1[0], a * t0[1] + b * t1[1], a * t0[2] + b * t1[2]]
        };
        let (e0, e1) = (dual(0), dual(1));
        let beta = [
            xi[0] * e0[0] + xi[1] * e1[0],
            xi[0] * e0[1] + xi[1] * e1[1],
            xi[0] * e0[2] + xi[1] * e1[2],
        ];
        let quad = ginv[0][0] * xi[0] * xi[0] + 2.0 * ginv[0][1] * xi[0] * xi[1] + ginv[1][1] * xi[1] * xi[1];
        Ok(Self {
            chart: Some(chart.clone()),
            x,
            xi,
            nu,
            beta,
            r0: dot(&beta, &beta),
            xi_norm: libm::sqrt(quad.max(0.0)),
        })
    }

    /// Sample given directly by a unit normal and a tangential `beta`.
    pub fn from_frame(nu: Vec3, beta: Vec3) -> Result<Self, SymbolError> {
        if (norm(&nu) - 1.0).abs() > 1e-12 {
            return Err(SymbolError::InvalidFrame("nu must be a unit vector"));
        }
        if dot(&nu, &beta).abs() > 1e-10 * (1.0 + norm(&beta)) {
            return Err(SymbolError::InvalidFrame("beta must be orthogonal to nu"));
        }
        let r0 = dot(&beta, &beta);
        Ok(Self { chart: None, x: [0.0; 2], xi: [0.0; 2], nu, beta, r0, xi_norm: libm::sqrt(r0) })
    }

    /// Same point with `xi'` replaced by `t xi'`.
    pub fn scaled(&self, t: f64) -> Result<Self, SymbolError> {
        match &self.chart {
            Some(c) => Self::new(c, self.x, [t * self.xi[0], t * self.xi[1]]),
            None => Self::from_frame(self.nu, scale(&self.beta, t)),
        }
    }

    pub fn chart(&self) -> Option<&Chart> {
        self.chart.as_ref()
    }

    pub fn x(&self) -> [f64; 2] {
        self.x
    }

    pub fn xi(&self) -> [f64; 2] {
        self.xi
    }

    pub fn nu(&self) -> Vec3 {
        self.nu
    }

    pub fn beta(&self) -> Vec3 {
        self.beta
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// `sqrt(g^{jk} xi_j xi_k)`, computed independently of `beta`.
    pub fn xi_norm(&self) -> f64 {
        self.xi_norm
    }

    fn direction(&self) -> Result<Vec3, SymbolError> {
        if !(self.r0 > 0.0) {
            return Err(SymbolError::ZeroCovector);
        }
        Ok(scale(&self.beta, 1.0 / libm::sqrt(self.r0)))
    }
}

/// `beta(x', xi') = xi_2 e^2 + xi_3 e^3`.
pub fn beta(sample: &CotangentSample) -> Vec3 {
    sample.beta
}

/// `B = beta beta^T`, i.e. `B v = <beta, v> beta`.
pub fn script_b(sample: &CotangentSample) -> Mat3 {
    outer(&sample.beta, &sample.beta)
}

/// Root of `rho^2 = z^2 - r0` with `Im rho > 0`.
pub fn rho(z: Complex64, r0: f64) -> Result<Complex64, SymbolError> {
    let w = z * z - r0;
    let mut root = w.sqrt();
    if root.im < 0.0 {
        root = -root;
    }
    if !(root.im > 0.0) {
        return Err(SymbolError::Branch { re: w.re, im: w.im });
    }
    Ok(root)
}

/// `z = -i (1 + i t)^{-1}`, the spectral parameter of the elliptic region.
pub fn spectral_parameter(t: f64) -> Complex64 {
    -Complex64::i() / Complex64::new(1.0, t)
}

fn real_to_complex(a: &Mat3) -> CMat3 {
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = Complex64::new(a[i][j], 0.0);
        }
    }
    out
}

/// `m = (1/z) (rho I + rho^{-1} B)`
pub fn principal_m(sample: &CotangentSample, z: Complex64) -> Result<CMat3, SymbolError> {
    let r = rho(z, sample.r0)?;
    let b = real_to_complex(&script_b(sample));
    let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let diag = if i == j { r } else { Complex64::new(0.0, 0.0) };
            m[i][j] = (diag + b[i][j] / r) / z;
        }
    }
    Ok(m)
}

/// Principal symbol of the magnetic-side parametrix, `m_1(z) = -m(z)`.
pub fn principal_m1(sample: &CotangentSample, z: Complex64) -> Result<CMat3, SymbolError> {
    let mut m = principal_m(sample, z)?;
    m.iter_mut().flatten().for_each(|v| *v = -*v);
    Ok(m)
}

/// Orthogonal frame with columns `[nu | nu x b | b]`, `b = beta / sqrt(r0)`.
pub fn build_u(sample: &CotangentSample) -> Result<Mat3, SymbolError> {
    let b = sample.direction()?;
    let nb = cross(&sample.nu, &b);
    let cols = [sample.nu, nb, b];
    let mut u = [[0.0; 3]; 3];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..3 {
            u[i][j] = c[i];
        }
    }
    Ok(u)
}

/// `(eigenvalue, unit eigenvector)` pairs of `B`: `(0, nu)`, `(0, nu x b)`, `(r0, b)`.
pub fn eigenstructure_b(sample: &CotangentSample) -> Result<[(f64, Vec3); 3], SymbolError> {
    let b = sample.direction()?;
    Ok([(0.0, sample.nu), (0.0, cross(&sample.nu, &b)), (sample.r0, b)])
}

/// `U^T (sqrt(1 + h^2 r0) (I - h^2 B / (1 + h^2 r0)) - gamma0 I) U`
pub fn diagonalized_symbol(sample: &CotangentSample, h: f64, gamma0: f64) -> Result<Mat3, SymbolError> {
    let u = build_u(sample)?;
    let q = 1.0 + h * h * sample.r0;
    let s = libm::sqrt(q);
    let bm = script_b(sample);
    let mut p = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            p[i][j] = s * (id - h * h * bm[i][j] / q) - gamma0 * id;
        }
    }
    Ok(mat3_mul(&mat3_mul(&mat3_transpose(&u), &p), &u))
}

/// Diagonal expected from [`diagonalized_symbol`]: `(s - g, s - g, 1/s - g)`.
pub fn diagonalized_expected(r0: f64, h: f64, gamma0: f64) -> [f64; 3] {
    let s = libm::sqrt(1.0 + h * h * r0);
    [s - gamma0, s - gamma0, 1.0 / s - gamma0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::AnalyticSurface;
    use core::f64::consts::{FRAC_PI_2, SQRT_2};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn equatorial_sphere_sample_has_unit_r0() {
        let s = AnalyticSurface::unit_sphere();
        let sample = CotangentSample::new(&s.charts()[0], [FRAC_PI_2, 0.3], [1.0, 0.0]).unwrap();
        assert!((sample.r0() - 1.0).abs() < 1e-12);
        assert!(dot(&sample.nu(), &sample.beta()).abs() < 1e-12);
    }

    #[test]
    fn phi_covector_is_scaled_by_inverse_sine() {
        // g^{phi phi} = 1 / sin^2 theta on the unit sphere
        let s = AnalyticSurface::unit_sphere();
        let theta = 0.7;
        let sample = CotangentSample::new(&s.charts()[0], [theta, 1.0], [0.0, 2.0]).unwrap();
        let want = 4.0 / libm::sin(theta).powi(2);
        assert!((sample.r0() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn zero_covector_gives_zero_beta() {
        let s = AnalyticSurface::unit_sphere();
        let sample = CotangentSample::new(&s.charts()[1], [1.0, 2.0], [0.0, 0.0]).unwrap();
        assert_eq!(sample.beta(), [0.0; 3]);
        assert_eq!(sample.r0(), 0.0);
        assert_eq!(build_u(&sample), Err(SymbolError::ZeroCovector));
        assert_eq!(eigenstructure_b(&sample).unwrap_err(), SymbolError::ZeroCovector);
    }

    #[test]
    fn doubling_covector_quadruples_r0() {
        let s = AnalyticSurface::ellipsoid(2.0, 1.0, 1.0).unwrap();
        let a = CotangentSample::new(&s.charts()[0], [1.1, 4.0], [0.3, -1.2]).unwrap();
        let b = a.scaled(2.0).unwrap();
        assert!((b.r0() - 4.0 * a.r0()).abs() < 1e-12 * b.r0());
    }

    #[test]
    fn chart_point_outside_domain_is_an_error() {
        let s = AnalyticSurface::unit_sphere();
        assert!(matches!(
            CotangentSample::new(&s.charts()[0], [0.01, 0.0], [1.0, 0.0]),
            Err(SymbolError::Chart(SurfaceError::OutsideDomain(..)))
        ));
    }

    #[test]
    fn rho_examples() {
        let z = c(0.0, -1.0);
        assert!((rho(z, 0.0).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        assert!((rho(z, 3.0).unwrap() - c(0.0, 2.0)).norm() < 1e-15);
        let zt = spectral_parameter(1e-4);
        assert!((rho(zt, 1.0).unwrap() - c(0.0, SQRT_2)).norm() <= 1e-4);
    }

    #[test]
    fn rho_rejects_real_axis() {
        assert!(matches!(rho(c(2.0, 0.0), 1.0), Err(SymbolError::Branch { .. })));
        assert!(matches!(rho(c(1.0, 0.0), 1.0), Err(SymbolError::Branch { .. })));
    }

    #[test]
    fn minus_m_examples() {
        let z = c(0.0, -1.0);
        let flat = CotangentSample::from_frame([0.0, 0.0, 1.0], [0.0; 3]).unwrap();
        let m = principal_m(&flat, z).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((-m[i][j] - c(want, 0.0)).norm() < 1e-12);
            }
        }
        let s3 = libm::sqrt(3.0);
        let sample = CotangentSample::from_frame([0.0, 0.0, 1.0], [s3, 0.0, 0.0]).unwrap();
        let m = principal_m(&sample, z).unwrap();
        let want = [0.5, 2.0, 2.0];
        for i in 0..3 {
            for j in 0..3 {
                let w = if i == j { want[i] } else { 0.0 };
                assert!((-m[i][j] - c(w, 0.0)).norm() < 1e-12, "{i}{j}");
            }
        }
        let m1 = principal_m1(&sample, z).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((m1[i][j] + m[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn u_example_and_scale_invariance() {
        let sample = CotangentSample::from_frame([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        let u = build_u(&sample).unwrap();
        assert_eq!(u, [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]);
        let d = mat3_mul(&mat3_mul(&mat3_transpose(&u), &script_b(&sample)), &u);
        assert_eq!(d, [[0.0; 3], [0.0; 3], [0.0, 0.0, 1.0]]);
        assert!((crate::linalg::mat3_det(&u).abs() - 1.0).abs() < 1e-15);
        assert_eq!(build_u(&sample.scaled(2.0).unwrap()).unwrap(), u);
    }

    #[test]
    fn eigenstructure_example() {
        let sample = CotangentSample::from_frame([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        let pairs = eigenstructure_b(&sample).unwrap();
        let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        assert_eq!(values, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn from_frame_validates() {
        assert!(CotangentSample::from_frame([0.0, 0.0, 2.0], [1.0, 0.0, 0.0]).is_err());
        assert!(CotangentSample::from_frame([0.0, 0.0, 1.0], [1.0, 0.0, 0.1]).is_err());
    }

    proptest! {
        #[test]
        fn beta_is_tangent_and_matches_inverse_metric(
            chart in 0usize..2, theta in 0.15f64..3.0, phi in 0.0f64..6.2,
            x0 in -5.0f64..5.0, x1 in -5.0f64..5.0,
        ) {
            let s = AnalyticSurface::ellipsoid(2.0, 1.0, 1.5).unwrap();
            let sample = CotangentSample::new(&s.charts()[chart], [theta, phi], [x0, x1]).unwrap();
            let scale_ = 1.0 + sample.r0();
            prop_assert!(dot(&sample.nu(), &sample.beta()).abs() < 1e-10 * scale_);
            prop_assert!((sample.r0() - sample.xi_norm().powi(2)).abs() < 1e-10 * scale_);
            let twice = sample.scaled(2.0).unwrap();
            for k in 0..3 {
                prop_assert!((twice.beta()[k] - 2.0 * sample.beta()[k]).abs() < 1e-12 * scale_);
            }
        }

        #[test]
        fn rho_squares_back_with_positive_imaginary_part(t in -1.0f64..1.0, r0 in 0.0f64..100.0) {
            let z = spectral_parameter(t);
            let r = rho(z, r0).unwrap();
            prop_assert!(r.im > 0.0);
            prop_assert!((r * r - (z * z - r0)).norm() < 1e-12 * (1.0 + r0));
        }

        #[test]
        fn m_is_complex_symmetric(b0 in -3.0f64..3.0, b1 in -3.0f64..3.0, t in -0.5f64..0.5) {
            let sample = CotangentSample::from_frame([0.0, 0.0, 1.0], [b0, b1, 0.0]).unwrap();
            let m = principal_m(&sample, spectral_parameter(t)).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((m[i][j] - m[j][i]).norm() < 1e-14);
                }
            }
        }
    }
}
