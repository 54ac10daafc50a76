//! Numerical core for semiclassical Weyl counting on closed surfaces with a
//! dissipative (impedance) damping coefficient.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`surface`]: analytic chart atlases, triangle meshes, the damping field
//!   and surface quadrature;
//! * [`lb_spectrum`]: Laplace-Beltrami eigenpairs, exact on the unit sphere
//!   and cotangent-FEM on meshes;
//! * [`symbols`]: the pointwise principal-symbol calculus on the cotangent
//!   bundle (covector `beta`, the root `rho`, the rank-one matrix `B`, the
//!   unitary frame `U` and the principal transport solutions);
//! * [`count`]: Galerkin models of the reduced operator `Q(h)`, negative
//!   eigenvalue counting and the Weyl prediction;
//! * [`regions`]: the complex-plane eigenvalue regions and the eigenvalue
//!   bound for constant damping.
//!
//! File formats, caching and the command line live in the `weyl-lab` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod count;
pub mod geom;
pub mod lb_spectrum;
pub mod linalg;
pub mod quadrature;
pub mod regions;
pub mod sphharm;
pub mod surface;
pub mod symbols;

pub use num_complex;
pub use surface::{AnalyticSurface, GammaField, Surface, SurfaceMesh};
pub use count::{build_q, count_negative, scan, weyl_coefficient, weyl_prediction, ConstantsCEps, CountReport, ModeCutPolicy};
pub use lb_spectrum::{assemble_fem, exact_sphere_spectrum, solve_lowest, BasisSource, MassScheme, SpectralBasis};
