//! Dense and sparse linear algebra used by the spectral solvers.
//!
//! Everything here is sized for the problems in this crate: dense symmetric
//! blocks of at most a few thousand rows and sparse mesh matrices with a
//! handful of nonzeros per row.

mod cg;
mod dense;
mod eigen;
mod sparse;

pub use cg::{conjugate_gradient, CgOutcome};
pub use dense::DMat;
pub use eigen::{symmetric_eigen, tridiagonal_eigen, SymmetricEigen};
pub use sparse::CsrMatrix;

use thiserror::Error;

pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("implicit QL iteration did not converge after {iterations} sweeps")]
    EigenNoConvergence { iterations: usize },
    #[error("conjugate gradient stalled at relative residual {residual:e} after {iterations} iterations")]
    CgNoConvergence { iterations: usize, residual: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

pub fn mat3_transpose(a: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn mat3_identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn mat3_det(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Frobenius norm of `a - b`.
pub fn mat3_dist(a: &Mat3, b: &Mat3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let d = a[i][j] - b[i][j];
            s += d * d;
        }
    }
    libm::sqrt(s)
}

pub fn mat3_mul_vec(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}
