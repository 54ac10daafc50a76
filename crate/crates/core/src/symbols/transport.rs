//! Principal transport amplitudes `a_00`, `b_00` of the boundary parametrix.
//!
//! With `psi_0 = rho nu - beta` the electric-side system is
//!
//! ```text
//! psi_0 x a - z b = 0,   psi_0 x b + z a = 0,   nu x a = g,
//! ```
//!
//! and the magnetic side is the same system with the boundary datum on `b`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{rho, CVec3, CotangentSample, SymbolError};
use crate::geom::{cross, dot, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportSide {
    /// Datum `nu x a_00 = g`.
    Electric,
    /// Datum `nu x b_00 = g`.
    Magnetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPrincipal {
    pub side: TransportSide,
    pub z: Complex64,
    pub rho: Complex64,
    pub g: Vec3,
    pub a00: CVec3,
    pub b00: CVec3,
    /// `nu x b_00` (electric side) or `nu x a_00` (magnetic side) from the
    /// closed form.
    pub nu_cross_other: CVec3,
    /// Largest residual of the three transport equations and of the closed
    /// form for `nu x (other amplitude)`.
    pub residual: f64,
}

fn c(v: &Vec3) -> CVec3 {
    [Complex64::new(v[0], 0.0), Complex64::new(v[1], 0.0), Complex64::new(v[2], 0.0)]
}

pub(crate) fn ccross(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn cscale(a: &CVec3, s: Complex64) -> CVec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn csub(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cadd(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn cnorm(a: &CVec3) -> f64 {
    libm::sqrt(a.iter().map(|x| x.norm_sqr()).sum())
}

/// Solves the principal transport system for tangential data `g`.
pub fn transport_principal(
    sample: &CotangentSample,
    z: Complex64,
    g: Vec3,
    side: TransportSide,
) -> Result<TransportPrincipal, SymbolError> {
    let nu = sample.nu();
    let beta = sample.beta();
    let off = dot(&nu, &g);
    if off.abs() > 1e-10 * (1.0 + crate::geom::norm(&g)) {
        return Err(SymbolError::NonTangential(off));
    }
    let r = rho(z, sample.r0())?;
    let nu_g = cross(&nu, &g);
    // the amplitude carrying the boundary datum
    let lead_coef = dot(&nu, &cross(&beta, &g));
    let lead = cadd(&cscale(&c(&nu_g), Complex64::new(-1.0, 0.0)), &cscale(&c(&nu), lead_coef / r));
    // nu x (other amplitude), closed form up to the sign of z
    let closed = cscale(
        &cadd(&cscale(&c(&nu_g), r), &cscale(&c(&beta), dot(&beta, &nu_g) / r)),
        Complex64::new(1.0, 0.0) / z,
    );
    let psi0 = csub(&cscale(&c(&nu), r), &c(&beta));
    let g_c = c(&g);
    let nu_c = c(&nu);

    let (a00, b00, nu_cross_other, residual) = match side {
        TransportSide::Electric => {
            let a = lead;
            let b = cscale(&ccross(&psi0, &a), Complex64::new(1.0, 0.0) / z);
            let eq1 = csub(&ccross(&psi0, &a), &cscale(&b, z));
            let eq2 = cadd(&ccross(&psi0, &b), &cscale(&a, z));
            let eq3 = csub(&ccross(&nu_c, &a), &g_c);
            let form = csub(&ccross(&nu_c, &b), &closed);
            let res = cnorm(&eq1).max(cnorm(&eq2)).max(cnorm(&eq3)).max(cnorm(&form));
            (a, b, closed, res)
        }
        TransportSide::Magnetic => {
            let b = lead;
            let a = cscale(&ccross(&psi0, &b), Complex64::new(-1.0, 0.0) / z);
            let closed = cscale(&closed, Complex64::new(-1.0, 0.0));
            let eq1 = csub(&ccross(&psi0, &a), &cscale(&b, z));
            let eq2 = cadd(&ccross(&psi0, &b), &cscale(&a, z));
            let eq3 = csub(&ccross(&nu_c, &b), &g_c);
            let form = csub(&ccross(&nu_c, &a), &closed);
            let res = cnorm(&eq1).max(cnorm(&eq2)).max(cnorm(&eq3)).max(cnorm(&form));
            (a, b, closed, res)
        }
    };
    Ok(TransportPrincipal { side, z, rho: r, g, a00, b00, nu_cross_other, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{principal_m, principal_m1, spectral_parameter};
    use core::f64::consts::FRAC_1_SQRT_2;
    use proptest::prelude::*;

    fn close(a: &CVec3, want: [(f64, f64); 3]) -> bool {
        a.iter().zip(want).all(|(x, (re, im))| (x - Complex64::new(re, im)).norm() < 1e-12)
    }

    fn example() -> CotangentSample {
        CotangentSample::from_frame([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn electric_example() {
        let t = transport_principal(&example(), Complex64::new(0.0, -1.0), [0.0, 1.0, 0.0], TransportSide::Electric)
            .unwrap();
        assert!((t.rho - Complex64::new(0.0, libm::sqrt(2.0))).norm() < 1e-15);
        assert!(close(&t.a00, [(1.0, 0.0), (0.0, 0.0), (0.0, -FRAC_1_SQRT_2)]));
        assert!(close(&ccross(&c(&[0.0, 0.0, 1.0]), &t.a00), [(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]));
        assert!(close(&t.nu_cross_other, [(FRAC_1_SQRT_2, 0.0), (0.0, 0.0), (0.0, 0.0)]));
        assert!(t.residual < 1e-12);
    }

    #[test]
    fn magnetic_example() {
        let t = transport_principal(&example(), Complex64::new(0.0, -1.0), [0.0, 1.0, 0.0], TransportSide::Magnetic)
            .unwrap();
        assert!(close(&t.b00, [(1.0, 0.0), (0.0, 0.0), (0.0, -FRAC_1_SQRT_2)]));
        assert!(close(&t.nu_cross_other, [(-FRAC_1_SQRT_2, 0.0), (0.0, 0.0), (0.0, 0.0)]));
        assert!(t.residual < 1e-12);
    }

    #[test]
    fn zero_data_gives_zero_amplitudes() {
        for side in [TransportSide::Electric, TransportSide::Magnetic] {
            let t = transport_principal(&example(), Complex64::new(0.0, -1.0), [0.0; 3], side).unwrap();
            assert!(cnorm(&t.a00) == 0.0 && cnorm(&t.b00) == 0.0 && cnorm(&t.nu_cross_other) == 0.0);
        }
    }

    #[test]
    fn normal_data_is_rejected() {
        let err = transport_principal(&example(), Complex64::new(0.0, -1.0), [0.0, 0.0, 1.0], TransportSide::Electric);
        assert!(matches!(err, Err(SymbolError::NonTangential(_))));
    }

    proptest! {
        #[test]
        fn closed_forms_act_as_m_and_m1(
            b0 in -4.0f64..4.0, b1 in -4.0f64..4.0, g0 in -1.0f64..1.0, g1 in -1.0f64..1.0, t in -0.5f64..0.5,
        ) {
            let sample = CotangentSample::from_frame([0.0, 0.0, 1.0], [b0, b1, 0.0]).unwrap();
            let z = spectral_parameter(t);
            let g = [g0, g1, 0.0];
            let nu_g = c(&cross(&sample.nu(), &g));
            let apply = |m: &[[Complex64; 3]; 3]| -> CVec3 {
                let mut out = [Complex64::new(0.0, 0.0); 3];
                for i in 0..3 {
                    for j in 0..3 {
                        out[i] += m[i][j] * nu_g[j];
                    }
                }
                out
            };
            let e = transport_principal(&sample, z, g, TransportSide::Electric).unwrap();
            let h = transport_principal(&sample, z, g, TransportSide::Magnetic).unwrap();
            prop_assert!(e.residual < 1e-10 && h.residual < 1e-10);
            prop_assert!(cnorm(&csub(&e.nu_cross_other, &apply(&principal_m(&sample, z).unwrap()))) < 1e-10);
            prop_assert!(cnorm(&csub(&h.nu_cross_other, &apply(&principal_m1(&sample, z).unwrap()))) < 1e-10);
        }
    }
}
