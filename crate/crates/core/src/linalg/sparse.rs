use std::fmt::Write as _;

use nalgebra::DMatrix;

/// Accumulates `(row, col, value)` entries before compression.
///
/// Duplicate entries are summed in insertion order when the builder is
/// finalized, so assembly in a fixed element order gives bit-identical
/// matrices.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, entries: Vec::new() }
    }

    pub fn with_capacity(n_rows: usize, n_cols: usize, capacity: usize) -> Self {
        Self { n_rows, n_cols, entries: Vec::with_capacity(capacity) }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n_rows && col < self.n_cols, "triplet ({row}, {col}) out of bounds");
        self.entries.push((row, col, value));
    }

    /// Appends another builder's entries after this one's.
    pub fn extend(&mut self, other: TripletBuilder) {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        self.entries.extend(other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(mut self) -> CsrMatrix {
        // stable sort keeps insertion order among duplicates
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.n_rows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values = Vec::with_capacity(self.entries.len());
        let mut k = 0;
        while k < self.entries.len() {
            let (r, c, mut v) = self.entries[k];
            k += 1;
            while k < self.entries.len() && self.entries[k].0 == r && self.entries[k].1 == c {
                v += self.entries[k].2;
                k += 1;
            }
            if v != 0.0 {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..self.n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix { n_rows: self.n_rows, n_cols: self.n_cols, row_ptr, col_idx, values }
    }
}

/// Compressed sparse row matrix with sorted column indices and no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_dense(dense: &DMatrix<f64>) -> Self {
        let mut b = TripletBuilder::new(dense.nrows(), dense.ncols());
        for i in 0..dense.nrows() {
            for j in 0..dense.ncols() {
                b.push(i, j, dense[(i, j)]);
            }
        }
        b.build()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    /// All stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `y = A x`
    pub fn spmv(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols, "spmv dimension mismatch");
        let mut y = vec![0.0; self.n_rows];
        self.spmv_into(x, &mut y);
        y
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// `y = Aᵀ x`
    pub fn transpose_spmv(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_rows, "transpose_spmv dimension mismatch");
        let mut y = vec![0.0; self.n_cols];
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut b = TripletBuilder::with_capacity(self.n_cols, self.n_rows, self.nnz());
        for (i, j, v) in self.iter() {
            b.push(j, i, v);
        }
        b.build()
    }

    /// Column sums, accumulated in row-major scan order.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n_cols];
        for (_, j, v) in self.iter() {
            s[j] += v;
        }
        s
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// Restriction to the given rows and columns, renumbered in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (k, &c) in cols.iter().enumerate() {
            col_map[c] = k;
        }
        let mut b = TripletBuilder::new(rows.len(), cols.len());
        for (ri, &r) in rows.iter().enumerate() {
            let (cs, vs) = self.row(r);
            for (&c, &v) in cs.iter().zip(vs) {
                if col_map[c] != usize::MAX {
                    b.push(ri, col_map[c], v);
                }
            }
        }
        b.build()
    }

    /// Applies `P A Pᵀ` where `perm[new] = old`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> CsrMatrix {
        assert!(self.is_square());
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut b = TripletBuilder::with_capacity(self.n_rows, self.n_cols, self.nnz());
        for (i, j, v) in self.iter() {
            b.push(inv[i], inv[j], v);
        }
        b.build()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.iter() {
            d[(i, j)] = v;
        }
        d
    }

    /// Largest elementwise difference between two matrices of equal shape.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut m: f64 = 0.0;
        for (i, j, v) in self.iter() {
            m = m.max((v - other.get(i, j)).abs());
        }
        for (i, j, v) in other.iter() {
            m = m.max((v - self.get(i, j)).abs());
        }
        m
    }

    /// Coordinate text dump, one `i j value` line per stored entry (0-based).
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::with_capacity(self.nnz() * 32);
        for (i, j, v) in self.iter() {
            let _ = writeln!(out, "{i} {j} {v:.17e}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let mut b = TripletBuilder::new(2, 2);
        b.push(0, 1, 1.0);
        b.push(0, 1, 2.0);
        b.push(1, 0, 1.0);
        b.push(1, 0, -1.0);
        b.push(1, 1, 5.0);
        let a = b.build();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 1), 3.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.row_ptr(), &[0, 1, 2]);
    }

    #[test]
    fn identity_spmv() {
        let a = CsrMatrix::identity(4);
        let x = vec![1.0, -2.0, 3.5, 0.25];
        assert_eq!(a.spmv(&x), x);
        assert_eq!(a.transpose_spmv(&x), x);
    }

    #[test]
    fn empty_row_gives_zero() {
        let mut b = TripletBuilder::new(3, 3);
        b.push(0, 0, 2.0);
        b.push(2, 1, 4.0);
        let a = b.build();
        let y = a.spmv(&[1.0, 1.0, 1.0]);
        assert_eq!(y, vec![2.0, 0.0, 4.0]);
    }

    #[test]
    fn random_product_matches_dense() {
        // fixed pseudo-random 5x5 pattern
        let vals = [
            [0.5, 0.0, -1.25, 0.0, 2.0],
            [0.0, 3.0, 0.0, 0.0, -0.5],
            [1.5, 0.0, 0.0, 4.25, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0],
            [-2.0, 0.75, 0.0, 1.0, 6.0],
        ];
        let dense = DMatrix::from_fn(5, 5, |i, j| vals[i][j]);
        let a = CsrMatrix::from_dense(&dense);
        let x = [0.3, -1.7, 2.2, 0.9, -0.4];
        let y = a.spmv(&x);
        let yt = a.transpose_spmv(&x);
        for i in 0..5 {
            let yd: f64 = (0..5).map(|j| vals[i][j] * x[j]).sum();
            let ytd: f64 = (0..5).map(|j| vals[j][i] * x[j]).sum();
            assert!((y[i] - yd).abs() <= 1e-14);
            assert!((yt[i] - ytd).abs() <= 1e-14);
        }
    }

    #[test]
    fn submatrix_renumbers() {
        let dense = DMatrix::from_fn(3, 3, |i, j| (3 * i + j) as f64);
        let a = CsrMatrix::from_dense(&dense);
        let s = a.submatrix(&[2, 0], &[1, 2]);
        assert_eq!(s.get(0, 0), 7.0);
        assert_eq!(s.get(0, 1), 8.0);
        assert_eq!(s.get(1, 0), 1.0);
        assert_eq!(s.get(1, 1), 2.0);
    }

    #[test]
    fn coordinate_dump_lists_entries() {
        let a = CsrMatrix::identity(2);
        let text = a.to_coordinate_text();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("1 1 "));
    }
}
