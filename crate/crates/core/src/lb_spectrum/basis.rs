use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::MassScheme;
use crate::linalg::{CsrMatrix, DMat};

/// Resolved-mode heuristic for mesh spectra: eigenvalues up to
/// `TRUSTED_MODES_PER_VERTEX * vertex_count / area` are trusted.
pub const TRUSTED_MODES_PER_VERTEX: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BasisSource {
    /// Real spherical harmonics of degree `0..=max_degree` on the unit sphere.
    ExactSphere { max_degree: usize },
    MeshFem { mass: MassScheme },
}

/// Eigenvalues (ascending, with multiplicity) of `-Delta_Gamma`, optionally
/// with mass-orthonormal eigenvectors in the vertex basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    eigenvalues: Vec<f64>,
    source: BasisSource,
    eigenvectors: Option<DMat>,
    mass: Option<CsrMatrix>,
    residuals: Option<Vec<f64>>,
    trusted_horizon: f64,
}

impl SpectralBasis {
    pub fn from_mesh_parts(
        eigenvalues: Vec<f64>,
        eigenvectors: Option<DMat>,
        mass: CsrMatrix,
        scheme: MassScheme,
        residuals: Option<Vec<f64>>,
    ) -> Self {
        let area: f64 = mass.row_sums().iter().sum();
        let trusted_horizon = TRUSTED_MODES_PER_VERTEX * mass.nrows() as f64 / area;
        if let Some(v) = &eigenvectors {
            assert_eq!(v.ncols(), eigenvalues.len());
            assert_eq!(v.nrows(), mass.nrows());
        }
        Self {
            eigenvalues,
            source: BasisSource::MeshFem { mass: scheme },
            eigenvectors,
            mass: Some(mass),
            residuals,
            trusted_horizon,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn source(&self) -> BasisSource {
        self.source
    }

    pub fn eigenvectors(&self) -> Option<&DMat> {
        self.eigenvectors.as_ref()
    }

    /// Mass matrix of the pencil the eigenvectors are orthonormal in.
    pub fn mass(&self) -> Option<&CsrMatrix> {
        self.mass.as_ref()
    }

    pub fn residuals(&self) -> Option<&[f64]> {
        self.residuals.as_deref()
    }

    /// Eigenvalues at or below this value are considered resolved.
    pub fn trusted_horizon(&self) -> f64 {
        self.trusted_horizon
    }

    /// Largest eigenvalue carried by the basis.
    pub fn top_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Keeps the lowest `count` modes.
    pub fn truncated(&self, count: usize) -> SpectralBasis {
        let count = count.min(self.mode_count());
        let mut out = self.clone();
        out.eigenvalues.truncate(count);
        if let Some(r) = out.residuals.as_mut() {
            r.truncate(count);
        }
        if let Some(v) = &self.eigenvectors {
            let n = v.nrows();
            out.eigenvectors = Some(DMat::from_column_major(n, count, v.as_slice()[..n * count].to_vec()));
        }
        if let BasisSource::ExactSphere { .. } = self.source {
            let degree = crate::sphharm::label_of(count.saturating_sub(1)).degree;
            out.source = BasisSource::ExactSphere { max_degree: degree };
            out.trusted_horizon = out.top_eigenvalue();
        }
        out
    }

    /// Largest `|<v_i, M v_j> - delta_ij|`, or `None` without eigenvectors.
    pub fn orthonormality_defect(&self) -> Option<f64> {
        let (v, m) = (self.eigenvectors.as_ref()?, self.mass.as_ref()?);
        let k = v.ncols();
        let mut worst: f64 = 0.0;
        for i in 0..k {
            let mvi = m.mul_vec(v.column(i));
            for j in 0..=i {
                let g: f64 = mvi.iter().zip(v.column(j)).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - want).abs());
            }
        }
        Some(worst)
    }
}

/// `n(n+1)` with multiplicity `2n+1` for `n = 0..=max_degree`.
pub fn exact_sphere_spectrum(max_degree: usize) -> SpectralBasis {
    let mut eigenvalues = Vec::with_capacity((max_degree + 1) * (max_degree + 1));
    for n in 0..=max_degree {
        let lam = (n * (n + 1)) as f64;
        eigenvalues.extend(core::iter::repeat_n(lam, 2 * n + 1));
    }
    let top = (max_degree * (max_degree + 1)) as f64;
    SpectralBasis {
        eigenvalues,
        source: BasisSource::ExactSphere { max_degree },
        eigenvectors: None,
        mass: None,
        residuals: None,
        trusted_horizon: top,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_spectrum_small_degrees() {
        assert_eq!(exact_sphere_spectrum(0).eigenvalues(), &[0.0]);
        assert_eq!(exact_sphere_spectrum(1).eigenvalues(), &[0.0, 2.0, 2.0, 2.0]);
        let b = exact_sphere_spectrum(2);
        assert_eq!(b.mode_count(), 9);
        assert!(b.eigenvalues()[4..].iter().all(|&l| l == 6.0));
        let b10 = exact_sphere_spectrum(10);
        assert_eq!(b10.mode_count(), 121);
        assert_eq!(b10.top_eigenvalue(), 110.0);
    }

    #[test]
    fn exact_spectrum_invariants() {
        let b = exact_sphere_spectrum(30);
        assert!(b.eigenvalues()[0] <= 1e-8);
        assert!(b.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn truncating_exact_basis_tracks_degree() {
        let b = exact_sphere_spectrum(10).truncated(16);
        assert_eq!(b.source(), BasisSource::ExactSphere { max_degree: 3 });
        assert_eq!(b.top_eigenvalue(), 12.0);
    }

    #[test]
    fn laplacian_weyl_law_on_sphere() {
        // #{lambda <= L} / L -> area / 4 pi = 1
        let b = exact_sphere_spectrum(80);
        let l = b.top_eigenvalue() / 2.0;
        let n = b.eigenvalues().iter().filter(|&&x| x <= l).count() as f64;
        assert!((n / l - 1.0).abs() < 0.1);
    }
}
