//! Lowest eigenpairs of the pencil `K v = lambda M v`.
//!
//! Large pencils use a shift-and-invert block Lanczos iteration on
//! `T = (K + sigma M)^{-1} M`, which is self-adjoint in the `M` inner product
//! and maps the lowest `lambda` to the largest `theta = 1 / (lambda + sigma)`.
//! Inner solves use Jacobi-preconditioned conjugate gradients. The block
//! size exceeds the largest eigenvalue multiplicity expected on symmetric
//! meshes (icosahedral symmetry has irreducible blocks of size up to 5), so
//! exactly degenerate clusters are captured in full. Small pencils are
//! solved densely.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::fem::Pencil;
use super::{SpectralBasis, SpectrumError};
use crate::linalg::{conjugate_gradient, symmetric_eigen, CsrMatrix, DMat};

/// Seed of the start block.
pub const DEFAULT_SEED: u64 = 0x5EED;

const CG_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    pub seed: u64,
    pub block_size: usize,
    /// Cap on the Krylov dimension; defaults to `max(4 count, count + 200)`.
    pub max_krylov: Option<usize>,
    /// Pencils of at most this dimension are solved densely.
    pub dense_limit: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, block_size: 8, max_krylov: None, dense_limit: 300 }
    }
}

fn check_request(pencil: &Pencil, count: usize, tol: f64) -> Result<(), SpectrumError> {
    if count == 0 || count > pencil.dim() {
        return Err(SpectrumError::InvalidRequest(format!(
            "requested {count} eigenpairs of a pencil of dimension {}",
            pencil.dim()
        )));
    }
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(SpectrumError::InvalidRequest(format!("tolerance {tol:e} outside (0, 1e-4]")));
    }
    Ok(())
}

/// Lowest `count` eigenpairs with residual `||K v - lambda M v|| / ||v|| <= tol (1 + lambda)`.
pub fn solve_lowest(pencil: &Pencil, count: usize, tol: f64) -> Result<SpectralBasis, SpectrumError> {
    solve_lowest_with(pencil, count, tol, &LanczosOptions::default())
}

pub fn solve_lowest_with(
    pencil: &Pencil,
    count: usize,
    tol: f64,
    opts: &LanczosOptions,
) -> Result<SpectralBasis, SpectrumError> {
    check_request(pencil, count, tol)?;
    let basis = if pencil.dim() <= opts.dense_limit {
        dense_lowest(pencil, count)?
    } else {
        block_lanczos(pencil, count, tol, opts)?
    };
    let worst = basis
        .residuals()
        .unwrap_or(&[])
        .iter()
        .zip(basis.eigenvalues())
        .map(|(r, l)| r / (1.0 + l.abs()))
        .fold(0.0, f64::max);
    if worst > tol {
        return Err(SpectrumError::NoConvergence { achieved: worst, requested: tol });
    }
    Ok(basis)
}

/// Dense reference solver: full eigen-decomposition of `M^{-1/2} K M^{-1/2}`.
pub fn solve_dense(pencil: &Pencil, count: usize) -> Result<SpectralBasis, SpectrumError> {
    check_request(pencil, count, 1e-4)?;
    dense_lowest(pencil, count)
}

/// Lower Cholesky factor (row-major `n * n`) of a dense SPD matrix.
fn cholesky(a: &DMat) -> Result<Vec<f64>, SpectrumError> {
    let n = a.nrows();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return Err(SpectrumError::InvalidRequest(format!("mass matrix not positive definite at row {i}")));
                }
                l[i * n + i] = libm::sqrt(sum);
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves `L x = b` in place.
fn forward_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Solves `L^T x = b` in place.
fn backward_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

fn dense_lowest(pencil: &Pencil, count: usize) -> Result<SpectralBasis, SpectrumError> {
    let n = pencil.dim();
    let l = cholesky(&pencil.mass.to_dense())?;
    // A = L^{-1} K L^{-T}, built column by column
    let k = pencil.stiffness.to_dense();
    let mut x = DMat::zeros(n, n);
    for j in 0..n {
        let col = x.column_mut(j);
        col.copy_from_slice(k.column(j));
        forward_solve(&l, n, col);
    }
    let xt = x.transpose();
    let mut a = DMat::zeros(n, n);
    for j in 0..n {
        let col = a.column_mut(j);
        col.copy_from_slice(xt.column(j));
        forward_solve(&l, n, col);
    }
    let sym = DMat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let eig = symmetric_eigen(&sym)?;
    let values: Vec<f64> = eig.values[..count].to_vec();
    let mut vectors = DMat::from_fn(n, count, |i, j| eig.vectors[(i, j)]);
    for j in 0..count {
        backward_solve(&l, n, vectors.column_mut(j));
    }
    let residuals = (0..count).map(|j| pencil.residual(values[j], vectors.column(j))).collect();
    Ok(SpectralBasis::from_mesh_parts(values, Some(vectors), pencil.mass.clone(), pencil.scheme, Some(residuals)))
}

struct ShiftInvert<'a> {
    pencil: &'a Pencil,
    sigma: f64,
    inv_diag: Vec<f64>,
}

impl ShiftInvert<'_> {
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>, SpectrumError> {
        let rhs = self.pencil.mass.mul_vec(x);
        let mut y = vec![0.0; x.len()];
        let op = |v: &[f64], out: &mut [f64]| {
            self.pencil.stiffness.mul_vec_into(v, out);
            for (o, m) in out.iter_mut().zip(self.pencil.mass.mul_vec(v)) {
                *o += self.sigma * m;
            }
        };
        conjugate_gradient(op, &self.inv_diag, &rhs, &mut y, CG_TOL, 20 * x.len() + 100)?;
        Ok(y)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn m_norm(w: &[f64], mass: &CsrMatrix) -> f64 {
    libm::sqrt(mass.bilinear(w, w))
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0).collect()
}

/// Orthogonalizes `w` against `basis` (two classical Gram-Schmidt passes) and
/// returns the accumulated coefficients.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>], mass: &CsrMatrix) -> Vec<f64> {
    let mut coeff = vec![0.0; basis.len()];
    for _ in 0..2 {
        let mw = mass.mul_vec(w);
        let c: Vec<f64> = basis.iter().map(|q| dot(q, &mw)).collect();
        for (q, ci) in basis.iter().zip(&c) {
            axpy(-ci, q, w);
        }
        for (acc, ci) in coeff.iter_mut().zip(&c) {
            *acc += ci;
        }
    }
    coeff
}

/// Appends `w` to the basis after orthonormalization; returns its norm before
/// normalization and the projection coefficients. Nearly dependent vectors
/// are replaced by fresh random directions (reported norm 0).
fn push_orthonormal(
    mut w: Vec<f64>,
    basis: &mut Vec<Vec<f64>>,
    mass: &CsrMatrix,
    rng: &mut ChaCha8Rng,
) -> (f64, Vec<f64>) {
    let before = m_norm(&w, mass);
    let coeff = orthogonalize(&mut w, basis, mass);
    let mut nrm = m_norm(&w, mass);
    let mut reported = nrm;
    while !(nrm > 1e-10 * before.max(f64::MIN_POSITIVE)) {
        w = random_vector(rng, mass.nrows());
        let b = m_norm(&w, mass);
        orthogonalize(&mut w, basis, mass);
        nrm = m_norm(&w, mass);
        reported = 0.0;
        if nrm > 1e-10 * b {
            break;
        }
    }
    w.iter_mut().for_each(|x| *x /= nrm);
    basis.push(w);
    (reported, coeff)
}

fn block_lanczos(
    pencil: &Pencil,
    count: usize,
    tol: f64,
    opts: &LanczosOptions,
) -> Result<SpectralBasis, SpectrumError> {
    let n = pencil.dim();
    let mass = &pencil.mass;
    let b = opts.block_size.clamp(1, n);
    let max_dim = opts.max_krylov.unwrap_or((4 * count).max(count + 200)).min(n);
    let sigma = 4.0 * core::f64::consts::PI / pencil.area();
    let diag = pencil.stiffness.diagonal();
    let op = ShiftInvert {
        pencil,
        sigma,
        inv_diag: diag.iter().zip(mass.diagonal()).map(|(k, m)| 1.0 / (k + sigma * m)).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_dim + b);
    for _ in 0..b {
        let w = random_vector(&mut rng, n);
        push_orthonormal(w, &mut basis, mass, &mut rng);
    }
    // h[k] holds the coefficients of T v_k on v_0, v_1, ...
    let mut h: Vec<Vec<f64>> = Vec::with_capacity(max_dim);
    let mut next_check = ((3 * count) / 2 + 2 * b).min(max_dim);
    let mut worst_seen = f64::INFINITY;

    loop {
        let done = h.len();
        // expand one block
        let block_end = (done + b).min(basis.len());
        for k in done..block_end {
            let tv = op.apply(&basis[k])?;
            let (nrm, mut coeff) = if basis.len() < n {
                push_orthonormal(tv, &mut basis, mass, &mut rng)
            } else {
                let mut w = tv;
                let c = orthogonalize(&mut w, &basis, mass);
                (0.0, c)
            };
            if coeff.len() < basis.len() {
                coeff.push(nrm);
            }
            h.push(coeff);
        }
        let dim = h.len();
        if dim < next_check && dim < max_dim && basis.len() > dim {
            continue;
        }

        // Rayleigh-Ritz on the square part, symmetrized
        let entry = |i: usize, k: usize| h[k].get(i).copied().unwrap_or(0.0);
        let hs = DMat::from_fn(dim, dim, |i, k| 0.5 * (entry(i, k) + entry(k, i)));
        let eig = symmetric_eigen(&hs)?;
        let wanted = count.min(dim);
        let mut values = Vec::with_capacity(wanted);
        let mut gate = true;
        let guard = (count + b).min(dim);
        for r in 0..guard {
            let idx = dim - 1 - r;
            let theta = eig.values[idx];
            let lambda = 1.0 / theta - sigma;
            // ||T x - theta x||_M from the coefficients beyond the square block
            let mut est2 = 0.0;
            for row in dim..basis.len() {
                let mut acc = 0.0;
                for (k, hk) in h.iter().enumerate() {
                    acc += hk.get(row).copied().unwrap_or(0.0) * eig.vectors[(k, idx)];
                }
                est2 += acc * acc;
            }
            if !(theta > 0.0) || libm::sqrt(est2) / theta > tol * (1.0 + lambda.abs()) {
                if r < count {
                    gate = false;
                }
            }
            if r < wanted {
                values.push((lambda, idx));
            }
        }
        if wanted == count && (gate || dim >= max_dim) {
            let vectors = DMat::from_fn(n, count, |i, j| {
                let idx = values[j].1;
                (0..dim).map(|k| basis[k][i] * eig.vectors[(k, idx)]).sum()
            });
            let lambdas: Vec<f64> = values.iter().map(|v| v.0).collect();
            let residuals: Vec<f64> = (0..count).map(|j| pencil.residual(lambdas[j], vectors.column(j))).collect();
            let worst = residuals.iter().zip(&lambdas).map(|(r, l)| r / (1.0 + l.abs())).fold(0.0, f64::max);
            worst_seen = worst_seen.min(worst);
            if worst <= tol {
                return Ok(SpectralBasis::from_mesh_parts(
                    lambdas,
                    Some(vectors),
                    mass.clone(),
                    pencil.scheme,
                    Some(residuals),
                ));
            }
        }
        if dim >= max_dim || basis.len() <= dim {
            return Err(SpectrumError::NoConvergence { achieved: worst_seen, requested: tol });
        }
        next_check = (dim + (dim / 4).max(2 * b)).min(max_dim);
    }
}
