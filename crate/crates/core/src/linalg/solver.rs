use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use super::sparse::CsrMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("solver failed: relative residual {residual:.3e} after {iterations} iterations")]
    SolverFailure { residual: f64, iterations: usize },
    #[error("dimension mismatch: matrix is {rows}x{cols}, right-hand side has {rhs} entries")]
    DimensionMismatch { rows: usize, cols: usize, rhs: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target relative residual `‖b − Ax‖₂ / ‖b‖₂`.
    pub tol: f64,
    pub max_iter: usize,
    /// Systems up to this size fall back to dense LU when the iteration stalls.
    pub dense_fallback_limit: usize,
    /// The iteration first aims for `tol * polish`, settling for `tol` if that stalls.
    pub polish: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 5000, dense_fallback_limit: 2000, polish: 1e-2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Trivial,
    BiCgStabIlu0,
    DenseLu,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Relative residual `‖b − Ax‖₂ / ‖b‖₂` (absolute when `b = 0`).
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.spmv(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
    let nb = norm2(b);
    if nb > 0.0 {
        norm2(&r) / nb
    } else {
        norm2(&r)
    }
}

/// Zero-fill incomplete LU factorization sharing the sparsity pattern of `A`.
///
/// `L` is unit lower triangular; both factors are stored in one value array.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    diag_pos: Vec<usize>,
}

impl Ilu0 {
    /// Returns `None` on a missing or zero pivot.
    pub fn new(a: &CsrMatrix) -> Option<Self> {
        let n = a.n_rows();
        let row_ptr = a.row_ptr().to_vec();
        let col_idx = a.col_idx().to_vec();
        let mut values = a.values().to_vec();
        let mut diag_pos = vec![usize::MAX; n];
        for i in 0..n {
            if let Some(k) = (row_ptr[i]..row_ptr[i + 1]).find(|&k| col_idx[k] == i) {
                diag_pos[i] = k;
            }
            if diag_pos[i] == usize::MAX {
                return None;
            }
        }
        let mut work = vec![usize::MAX; n];
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                work[col_idx[k]] = k;
            }
            for k in row_ptr[i]..row_ptr[i + 1] {
                let j = col_idx[k];
                if j >= i {
                    break;
                }
                let pivot = values[diag_pos[j]];
                let lij = values[k] / pivot;
                values[k] = lij;
                for kk in (diag_pos[j] + 1)..row_ptr[j + 1] {
                    let w = work[col_idx[kk]];
                    if w != usize::MAX {
                        values[w] -= lij * values[kk];
                    }
                }
            }
            for k in row_ptr[i]..row_ptr[i + 1] {
                work[col_idx[k]] = usize::MAX;
            }
            let d = values[diag_pos[i]];
            if d == 0.0 || !d.is_finite() {
                return None;
            }
        }
        Some(Self { row_ptr, col_idx, values, diag_pos })
    }

    /// Solves `LU z = r` in place.
    pub fn apply(&self, z: &mut [f64]) {
        let n = z.len();
        for i in 0..n {
            let mut s = z[i];
            for k in self.row_ptr[i]..self.diag_pos[i] {
                s -= self.values[k] * z[self.col_idx[k]];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (self.diag_pos[i] + 1)..self.row_ptr[i + 1] {
                s -= self.values[k] * z[self.col_idx[k]];
            }
            z[i] = s / self.values[self.diag_pos[i]];
        }
    }
}

/// Preconditioned BiCGStab. Returns the iterate and the iteration count;
/// `None` on breakdown or when the tolerance is not met.
fn bicgstab(a: &CsrMatrix, b: &[f64], ilu: &Ilu0, tol: f64, max_iter: usize) -> Option<(Vec<f64>, usize)> {
    let n = b.len();
    let nb = norm2(b);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut s = vec![0.0; n];
    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            return None;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        y.copy_from_slice(&p);
        ilu.apply(&mut y);
        a.spmv_into(&y, &mut v);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        alpha = rho_new / denom;
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        if norm2(&s) <= 0.1 * tol * nb {
            for k in 0..n {
                x[k] += alpha * y[k];
            }
            if relative_residual(a, &x, b) <= tol {
                return Some((x, it));
            }
        }
        z.copy_from_slice(&s);
        ilu.apply(&mut z);
        a.spmv_into(&z, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            return None;
        }
        omega = dot(&t, &s) / tt;
        for k in 0..n {
            x[k] += alpha * y[k] + omega * z[k];
            r[k] = s[k] - omega * t[k];
        }
        rho = rho_new;
        if norm2(&r) <= 0.1 * tol * nb {
            // guard against drift between recursive and true residual
            if relative_residual(a, &x, b) <= tol {
                return Some((x, it));
            }
            r = b.iter().zip(a.spmv(&x)).map(|(bi, axi)| bi - axi).collect();
        }
        if omega == 0.0 || !omega.is_finite() {
            return None;
        }
    }
    None
}

fn dense_lu(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<(Vec<f64>, usize), f64> {
    let dense: DMatrix<f64> = a.to_dense();
    let lu = dense.clone().lu();
    let rhs = DVector::from_column_slice(b);
    let mut x = match lu.solve(&rhs) {
        Some(x) => x,
        None => return Err(f64::INFINITY),
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(f64::INFINITY);
    }
    let mut steps = 1;
    // a few rounds of iterative refinement for badly scaled systems
    for _ in 0..3 {
        let res = relative_residual(a, x.as_slice(), b);
        if res <= tol {
            return Ok((x.as_slice().to_vec(), steps));
        }
        let r = &rhs - &dense * &x;
        match lu.solve(&r) {
            Some(dx) => x += dx,
            None => break,
        }
        steps += 1;
    }
    let res = relative_residual(a, x.as_slice(), b);
    if res <= tol {
        Ok((x.as_slice().to_vec(), steps))
    } else {
        Err(res)
    }
}

/// Solves `A x = b` to relative residual `opts.tol`.
///
/// BiCGStab with ILU(0) preconditioning runs first; if it breaks down or
/// stalls and `n ≤ opts.dense_fallback_limit`, a dense LU factorization with
/// iterative refinement is used instead. Deterministic for given inputs.
pub fn solve_sparse(a: &CsrMatrix, b: &[f64], opts: &SolverOptions) -> Result<Solution, SolverError> {
    if !a.is_square() || a.n_rows() != b.len() {
        return Err(SolverError::DimensionMismatch { rows: a.n_rows(), cols: a.n_cols(), rhs: b.len() });
    }
    let n = b.len();
    if n == 0 || norm2(b) == 0.0 {
        return Ok(Solution { x: vec![0.0; n], residual: 0.0, iterations: 0, method: SolveMethod::Trivial });
    }
    let mut iterations = 0;
    if let Some(ilu) = Ilu0::new(a) {
        let strict = bicgstab(a, b, &ilu, opts.tol * opts.polish, opts.max_iter);
        if let Some((x, it)) = strict.or_else(|| bicgstab(a, b, &ilu, opts.tol, opts.max_iter)) {
            let residual = relative_residual(a, &x, b);
            return Ok(Solution { x, residual, iterations: it, method: SolveMethod::BiCgStabIlu0 });
        }
        iterations = opts.max_iter;
    }
    if n <= opts.dense_fallback_limit {
        return match dense_lu(a, b, opts.tol * opts.polish).or_else(|_| dense_lu(a, b, opts.tol)) {
            Ok((x, steps)) => {
                let residual = relative_residual(a, &x, b);
                Ok(Solution { x, residual, iterations: steps, method: SolveMethod::DenseLu })
            }
            Err(residual) => Err(SolverError::SolverFailure { residual, iterations }),
        };
    }
    Err(SolverError::SolverFailure { residual: f64::INFINITY, iterations })
}
