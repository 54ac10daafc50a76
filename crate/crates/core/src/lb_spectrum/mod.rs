//! Eigenpairs of the Laplace-Beltrami operator `-Delta_Gamma`.
//!
//! Two sources: the closed-form spectrum of the unit sphere and a cotangent
//! finite-element discretization of a triangle mesh, solved as the
//! generalized symmetric pencil `K v = lambda M v`.

mod basis;
mod fem;
mod lanczos;

pub use basis::{exact_sphere_spectrum, BasisSource, SpectralBasis, TRUSTED_MODES_PER_VERTEX};
pub use fem::{assemble_fem, MassScheme, Pencil};
pub use lanczos::{solve_dense, solve_lowest, solve_lowest_with, LanczosOptions, DEFAULT_SEED};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::surface::SurfaceError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Mesh(#[from] SurfaceError),
    #[error("invalid request: {0}")]
    InvalidRequest(alloc::string::String),
    #[error("eigensolver did not converge: worst residual {achieved:e} exceeds tolerance {requested:e}")]
    NoConvergence { achieved: f64, requested: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
