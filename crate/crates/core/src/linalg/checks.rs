//! Structural verifiers for assembled matrices.

use super::sparse::CsrMatrix;

/// Relative tolerance used when no explicit tolerance is given.
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-12;

/// Outcome of [`m_matrix_check`]. Violations are listed in row-major scan
/// order so two runs on the same matrix give identical reports.
#[derive(Debug, Clone, PartialEq)]
pub struct MMatrixReport {
    pub is_m_matrix: bool,
    /// Absolute tolerance the verdict was computed with.
    pub tol: f64,
    /// Off-diagonal entries `A_ij > tol`.
    pub positive_off_diagonal: Vec<(usize, usize, f64)>,
    /// Diagonal entries `A_ii ≤ 0`.
    pub nonpositive_diagonal: Vec<(usize, f64)>,
    /// Columns with `Σ_i A_ij < −tol`.
    pub negative_column_sums: Vec<(usize, f64)>,
    pub strictly_dominant_columns: usize,
    pub min_column_sum: f64,
}

impl MMatrixReport {
    /// Entries that break the sign pattern, as `(i, j, value)`.
    pub fn offending_entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = self.positive_off_diagonal.clone();
        out.extend(self.nonpositive_diagonal.iter().map(|&(i, v)| (i, i, v)));
        out
    }
}

/// `tol = DEFAULT_RELATIVE_TOL · max|A_ij|`.
pub fn default_tolerance(a: &CsrMatrix) -> f64 {
    DEFAULT_RELATIVE_TOL * a.max_abs()
}

/// Checks the column-dominance characterization of an M-matrix: nonpositive
/// off-diagonal entries, positive diagonal, nonnegative column sums and at
/// least one strictly positive column sum.
///
/// Pass `None` for the default tolerance.
pub fn m_matrix_check(a: &CsrMatrix, tol: Option<f64>) -> MMatrixReport {
    assert!(a.is_square(), "m_matrix_check needs a square matrix");
    let tol = tol.unwrap_or_else(|| default_tolerance(a));
    let n = a.n_rows();
    let mut positive_off_diagonal = Vec::new();
    let mut diag = vec![0.0; n];
    for (i, j, v) in a.iter() {
        if i == j {
            diag[i] = v;
        } else if v > tol {
            positive_off_diagonal.push((i, j, v));
        }
    }
    let nonpositive_diagonal: Vec<_> = diag.iter().enumerate().filter(|(_, &d)| d <= 0.0).map(|(i, &d)| (i, d)).collect();
    let sums = a.column_sums();
    let negative_column_sums: Vec<_> =
        sums.iter().enumerate().filter(|(_, &s)| s < -tol).map(|(j, &s)| (j, s)).collect();
    let strictly_dominant_columns = sums.iter().filter(|&&s| s > tol).count();
    let min_column_sum = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let is_m_matrix = n > 0
        && positive_off_diagonal.is_empty()
        && nonpositive_diagonal.is_empty()
        && negative_column_sums.is_empty()
        && strictly_dominant_columns > 0;
    MMatrixReport {
        is_m_matrix,
        tol,
        positive_off_diagonal,
        nonpositive_diagonal,
        negative_column_sums,
        strictly_dominant_columns,
        min_column_sum,
    }
}

/// Largest `|A_ij − A_ji|` over all stored entries.
pub fn asymmetry(a: &CsrMatrix) -> f64 {
    assert!(a.is_square());
    a.iter().fold(0.0, |m: f64, (i, j, v)| m.max((v - a.get(j, i)).abs()))
}

pub fn symmetry_check(a: &CsrMatrix, tol: f64) -> bool {
    asymmetry(a) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense(rows: &[&[f64]]) -> CsrMatrix {
        let n = rows.len();
        CsrMatrix::from_dense(&DMatrix::from_fn(n, rows[0].len(), |i, j| rows[i][j]))
    }

    #[test]
    fn identity_is_m_matrix() {
        let r = m_matrix_check(&CsrMatrix::identity(3), None);
        assert!(r.is_m_matrix);
        assert_eq!(r.strictly_dominant_columns, 3);
    }

    #[test]
    fn classic_two_by_two() {
        let r = m_matrix_check(&dense(&[&[2.0, -1.0], &[-1.0, 2.0]]), None);
        assert!(r.is_m_matrix);
    }

    #[test]
    fn positive_off_diagonal_rejected() {
        let r = m_matrix_check(&dense(&[&[1.0, 0.5], &[0.5, 1.0]]), None);
        assert!(!r.is_m_matrix);
        assert_eq!(r.positive_off_diagonal, vec![(0, 1, 0.5), (1, 0, 0.5)]);
    }

    #[test]
    fn singular_laplacian_lacks_strict_column() {
        let r = m_matrix_check(&dense(&[&[1.0, -1.0], &[-1.0, 1.0]]), None);
        assert!(!r.is_m_matrix);
        assert_eq!(r.strictly_dominant_columns, 0);
    }

    #[test]
    fn symmetry() {
        assert!(symmetry_check(&CsrMatrix::identity(4), 0.0));
        assert!(!symmetry_check(&dense(&[&[0.0, 1.0], &[0.0, 0.0]]), 1e-12));
    }
}
