use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::SpectrumError;
use crate::linalg::CsrMatrix;
use crate::surface::SurfaceMesh;

/// Mass matrix used with the cotangent stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassScheme {
    /// Diagonal mixed-Voronoi vertex areas.
    Lumped,
    /// Piecewise-linear Galerkin mass; eigenvalues are upper bounds for the
    /// polyhedral surface.
    Consistent,
    /// Average of lumped and consistent. The leading discretization errors of
    /// the two have opposite signs and largely cancel.
    #[default]
    Mixed,
}

/// Cotangent stiffness `K` and mass `M` of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub scheme: MassScheme,
}

impl Pencil {
    pub fn dim(&self) -> usize {
        self.mass.nrows()
    }

    pub fn area(&self) -> f64 {
        self.mass.row_sums().iter().sum()
    }

    /// `||K v - lambda M v|| / ||v||`
    pub fn residual(&self, lambda: f64, v: &[f64]) -> f64 {
        let kv = self.stiffness.mul_vec(v);
        let mv = self.mass.mul_vec(v);
        let r: f64 = kv.iter().zip(&mv).map(|(k, m)| { let d = k - lambda * m; d * d }).sum();
        let vn: f64 = v.iter().map(|x| x * x).sum();
        libm::sqrt(r / vn)
    }
}

/// Assembles the cotangent-weight stiffness matrix and the requested mass.
///
/// The mesh has already been validated on construction; degenerate triangles
/// can therefore not occur, but a near-degenerate one (infinite cotangent) is
/// still reported as a mesh-quality error.
pub fn assemble_fem(mesh: &SurfaceMesh, scheme: MassScheme) -> Result<Pencil, SpectrumError> {
    let n = mesh.vertices().len();
    let mut stiff = Vec::with_capacity(mesh.triangles().len() * 12);
    let mut consistent = Vec::with_capacity(mesh.triangles().len() * 9);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = [mesh.vertices()[tri[0]], mesh.vertices()[tri[1]], mesh.vertices()[tri[2]]];
        let cots = crate::surface::mesh_corner_cotangents(&p);
        for k in 0..3 {
            if !cots[k].is_finite() {
                return Err(SpectrumError::Mesh(crate::surface::SurfaceError::MeshQuality(alloc::format!(
                    "triangle {t} has a degenerate corner"
                ))));
            }
            // edge (i, j) opposite corner k
            let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let w = 0.5 * cots[k];
            stiff.push((i, j, -w));
            stiff.push((j, i, -w));
            stiff.push((i, i, w));
            stiff.push((j, j, w));
        }
        if scheme != MassScheme::Lumped {
            let area = crate::surface::mesh::triangle_area(mesh.vertices(), tri);
            for a in 0..3 {
                for b in 0..3 {
                    let v = if a == b { area / 6.0 } else { area / 12.0 };
                    consistent.push((tri[a], tri[b], v));
                }
            }
        }
    }
    let lumped = mesh.vertex_areas();
    let mass = match scheme {
        MassScheme::Lumped => CsrMatrix::from_diagonal(&lumped),
        MassScheme::Consistent => CsrMatrix::from_triplets(n, n, consistent),
        MassScheme::Mixed => {
            let mut all: Vec<_> = consistent.into_iter().map(|(i, j, v)| (i, j, 0.5 * v)).collect();
            all.extend(lumped.iter().enumerate().map(|(i, m)| (i, i, 0.5 * m)));
            CsrMatrix::from_triplets(n, n, all)
        }
    };
    Ok(Pencil { stiffness: CsrMatrix::from_triplets(n, n, stiff), mass, scheme })
}
