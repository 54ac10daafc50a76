use alloc::vec;
use alloc::vec::Vec;

use super::LinalgError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradient for a symmetric positive definite
/// operator. `x` holds the initial guess and receives the solution.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    inv_diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<CgOutcome, LinalgError> {
    let n = b.len();
    let bnorm = libm::sqrt(b.iter().map(|v| v * v).sum::<f64>());
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgOutcome { iterations: 0, relative_residual: 0.0 });
    }
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    let mut rel = libm::sqrt(r.iter().map(|v| v * v).sum::<f64>()) / bnorm;
    for it in 0..max_iter {
        if rel <= rel_tol {
            return Ok(CgOutcome { iterations: it, relative_residual: rel });
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = libm::sqrt(r.iter().map(|v| v * v).sum::<f64>()) / bnorm;
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if rel <= rel_tol {
        Ok(CgOutcome { iterations: max_iter, relative_residual: rel })
    } else {
        Err(LinalgError::CgNoConvergence { iterations: max_iter, residual: rel })
    }
}
