//! The boundary surface: analytic chart atlases and triangle meshes, the
//! damping coefficient on it, and surface quadrature.

mod analytic;
mod chart;
mod gamma;
pub(crate) mod mesh;

pub use analytic::{AnalyticSurface, SurfaceName};
pub use chart::{Chart, Derivatives, ParamRect, PolarAxis, FD_STEP};
pub use gamma::{GammaField, GammaKind, GammaRange, Regime, Site};
pub use mesh::{icosphere, SurfaceMesh};
pub(crate) use mesh::corner_cotangents as mesh_corner_cotangents;

use thiserror::Error;

use crate::geom::Vec3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("chart is degenerate at ({0}, {1}): Gram determinant {2:e}")]
    ChartDegenerate(f64, f64, f64),
    #[error("parameter ({0}, {1}) lies outside the chart domain")]
    OutsideDomain(f64, f64),
    #[error("invalid surface parameters: {0}")]
    InvalidParams(&'static str),
    #[error("mesh quality: {0}")]
    MeshQuality(alloc::string::String),
    #[error("invalid damping field: {0}")]
    InvalidField(alloc::string::String),
}

/// Either representation of the boundary.
#[derive(Debug, Clone)]
pub enum Surface {
    Analytic(AnalyticSurface),
    Mesh(SurfaceMesh),
}

impl Surface {
    pub fn area(&self) -> f64 {
        match self {
            Surface::Analytic(s) => s.area(),
            Surface::Mesh(m) => m.area(),
        }
    }

    /// Integral of `f` over the surface. `f` receives the quadrature site so
    /// per-vertex data can be looked up on meshes.
    pub fn integrate(&self, f: impl Fn(Site) -> f64) -> f64 {
        match self {
            Surface::Analytic(s) => s.integrate(|p| f(Site::Point(*p))),
            Surface::Mesh(m) => m.integrate_vertices(|i, p| f(Site::Vertex(i, *p))),
        }
    }

    /// Range of `<w, x>` over the surface.
    pub fn support_range(&self, w: &Vec3) -> (f64, f64) {
        match self {
            Surface::Analytic(s) => s.support_range(w),
            Surface::Mesh(m) => m.support_range(w),
        }
    }

    pub fn vertex_count(&self) -> Option<usize> {
        match self {
            Surface::Analytic(_) => None,
            Surface::Mesh(m) => Some(m.vertices().len()),
        }
    }
}
