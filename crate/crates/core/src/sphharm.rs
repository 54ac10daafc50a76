//! Real spherical-harmonic machinery on the unit sphere.
//!
//! The exact Laplace-Beltrami basis of the unit sphere is the family of real
//! spherical harmonics `Y_{n,m,c}`, `Y_{n,m,s}`. For a multiplication operator
//! by a function of a single coordinate `mu = <w, x>` the Galerkin matrix is
//! block diagonal: harmonics with different `(m, parity)` do not couple, and
//! each block is a Gram matrix of normalized associated Legendre functions.

use alloc::vec;
use alloc::vec::Vec;

use crate::quadrature::gauss_legendre;

/// Degree, order and azimuthal parity of a real spherical harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicLabel {
    pub degree: usize,
    pub order: usize,
    /// `false` for the cosine (and m = 0) family, `true` for sine.
    pub sine: bool,
}

/// Index of the first mode of degree `n` in the ascending exact spectrum.
pub fn shell_start(n: usize) -> usize {
    n * n
}

/// Label of mode `index`. Within each degree shell the order is
/// `m = 0`, then `(m, cos), (m, sin)` for `m = 1..=n`.
pub fn label_of(index: usize) -> HarmonicLabel {
    let degree = libm::sqrt(index as f64) as usize;
    let degree = if (degree + 1) * (degree + 1) <= index {
        degree + 1
    } else if degree * degree > index {
        degree - 1
    } else {
        degree
    };
    let k = index - degree * degree;
    if k == 0 {
        HarmonicLabel { degree, order: 0, sine: false }
    } else {
        HarmonicLabel { degree, order: (k + 1) / 2, sine: k % 2 == 0 }
    }
}

/// Inverse of [`label_of`].
pub fn index_of(label: HarmonicLabel) -> usize {
    let base = label.degree * label.degree;
    if label.order == 0 {
        base
    } else {
        base + 2 * label.order - 1 + usize::from(label.sine)
    }
}

/// Fully normalized associated Legendre functions `p_{l,m}(mu)` for
/// `l = m..=max_degree`, with `int_{-1}^{1} p_{l,m}^2 dmu = 1`.
pub fn normalized_legendre(m: usize, max_degree: usize, mu: f64) -> Vec<f64> {
    if m > max_degree {
        return Vec::new();
    }
    let s = libm::sqrt((1.0 - mu * mu).max(0.0));
    let mut pmm = libm::sqrt(0.5);
    for k in 1..=m {
        let k = k as f64;
        pmm *= libm::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
    }
    let mut out = vec![0.0; max_degree - m + 1];
    out[0] = pmm;
    if max_degree == m {
        return out;
    }
    out[1] = libm::sqrt(2.0 * m as f64 + 3.0) * mu * pmm;
    let mf = m as f64;
    for l in (m + 2)..=max_degree {
        let lf = l as f64;
        let a = libm::sqrt((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf));
        let b = libm::sqrt(((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0));
        out[l - m] = a * (mu * out[l - m - 1] - b * out[l - m - 2]);
    }
    out
}

/// Gram matrices `G^{(m)}_{l,l'} = int_{-1}^{1} f(mu) p_{l,m} p_{l',m} dmu` for
/// `m = 0..=max_degree`, each of size `(max_degree - m + 1)^2`, stored
/// row-major. `extra_nodes` Gauss points are added on top of the `max_degree + 1`
/// needed for exactness with constant `f`.
pub fn axisymmetric_gram(max_degree: usize, extra_nodes: usize, f: impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
    let rule = gauss_legendre(max_degree + 1 + extra_nodes);
    let fvals: Vec<f64> = rule.nodes.iter().map(|&mu| f(mu)).collect();
    (0..=max_degree)
        .map(|m| {
            let size = max_degree - m + 1;
            let mut g = vec![0.0; size * size];
            for ((&mu, &w), &fv) in rule.nodes.iter().zip(&rule.weights).zip(&fvals) {
                let p = normalized_legendre(m, max_degree, mu);
                let wf = w * fv;
                for i in 0..size {
                    let pi = wf * p[i];
                    for j in 0..=i {
                        g[i * size + j] += pi * p[j];
                    }
                }
            }
            for i in 0..size {
                for j in 0..i {
                    g[j * size + i] = g[i * size + j];
                }
            }
            g
        })
        .collect()
}

/// Closed-form coupling `<Y_{l+1,m}, mu Y_{l,m}>`, used as an independent check
/// of the quadrature route.
pub fn mu_coupling(l: usize, m: usize) -> f64 {
    let (l, m) = (l as f64, m as f64);
    libm::sqrt(((l + 1.0) * (l + 1.0) - m * m) / ((2.0 * l + 1.0) * (2.0 * l + 3.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for i in 0..400 {
            let lab = label_of(i);
            assert!(lab.order <= lab.degree);
            assert_eq!(index_of(lab), i);
        }
        assert_eq!(label_of(0), HarmonicLabel { degree: 0, order: 0, sine: false });
        assert_eq!(label_of(3), HarmonicLabel { degree: 1, order: 1, sine: true });
        assert_eq!(shell_start(3), 9);
    }

    #[test]
    fn legendre_is_orthonormal() {
        let g = axisymmetric_gram(12, 0, |_| 1.0);
        for (m, block) in g.iter().enumerate() {
            let size = 12 - m + 1;
            for i in 0..size {
                for j in 0..size {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((block[i * size + j] - want).abs() < 1e-12, "m={m} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn mu_gram_matches_closed_form() {
        let g = axisymmetric_gram(10, 1, |mu| mu);
        for (m, block) in g.iter().enumerate() {
            let size = 10 - m + 1;
            for i in 0..size {
                assert!(block[i * size + i].abs() < 1e-13);
                if i + 1 < size {
                    let want = mu_coupling(m + i, m);
                    assert!((block[i * size + i + 1].abs() - want).abs() < 1e-13);
                }
            }
        }
    }
}
