//! Compressed sparse row storage for square coefficient matrices.

use crate::dense::DenseMatrix;
use crate::error::{check_len, Error, Result};

/// Largest order the dense oracle paths will materialize by default.
pub const DEFAULT_DENSE_CAP: usize = 2000;

/// Square sparse matrix in CSR form with 0-based indices.
///
/// Within each row the column indices are strictly increasing and every
/// stored value is finite. Instances are immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating every invariant.
    pub fn new(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != n + 1 {
            return Err(Error::InvalidCsr(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                n + 1
            )));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidCsr("row_ptr[0] must be 0".into()));
        }
        if col_idx.len() != values.len() || row_ptr[n] != values.len() {
            return Err(Error::InvalidCsr(format!(
                "row_ptr[n]={} but {} column indices and {} values",
                row_ptr[n],
                col_idx.len(),
                values.len()
            )));
        }
        for i in 0..n {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidCsr(format!("row_ptr decreases at row {i}")));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidCsr(format!(
                    "columns of row {i} are not strictly increasing"
                )));
            }
            if cols.last().is_some_and(|&c| c >= n) {
                return Err(Error::InvalidCsr(format!("column index out of range in row {i}")));
            }
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidCsr(format!("non-finite value at position {k}")));
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    ///
    /// Explicitly supplied zeros are stored.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        if let Some(&(i, j, _)) = sorted.iter().find(|t| t.0 >= n || t.1 >= n) {
            return Err(Error::InvalidCsr(format!(
                "entry ({i}, {j}) outside a {n}x{n} matrix"
            )));
        }
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self::new(n, row_ptr, col_idx, values)
    }

    /// Converts a dense matrix, storing only the non-zero entries.
    pub fn from_dense(a: &DenseMatrix) -> Result<Self> {
        check_len(a.nrows(), a.ncols())?;
        let n = a.nrows();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for (j, &v) in a.row(i).iter().enumerate() {
                if v != 0.0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(values.len());
        }
        Self::new(n, row_ptr, col_idx, values)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Replaces the values while keeping the pattern.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values,
        }
    }

    /// `A + diag(d)`.
    pub fn add_diagonal(&self, d: &[f64]) -> Result<Self> {
        check_len(self.n, d.len())?;
        let mut values = self.values.clone();
        let mut missing = Vec::new();
        for (i, &di) in d.iter().enumerate() {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            match self.col_idx[lo..hi].binary_search(&i) {
                Ok(k) => values[lo + k] += di,
                Err(_) => missing.push((i, i, di)),
            }
        }
        let out = self.with_values(values);
        if missing.is_empty() {
            return Ok(out);
        }
        let mut t = out.triplets();
        t.extend(missing);
        Self::from_triplets(self.n, &t)
    }

    /// Stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            let (c, v) = self.row(i);
            t.extend(c.iter().zip(v).map(|(&j, &x)| (i, j, x)));
        }
        t
    }

    /// Builds without validation; callers guarantee the invariants.
    pub(crate) fn from_parts_unchecked(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert!(Self::new(n, row_ptr.clone(), col_idx.clone(), values.clone()).is_ok());
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Matrix order N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
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
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Stored value at `(i, j)`, zero when absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        let mut y = vec![0.0; self.n];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` into a caller buffer. Panics on length mismatch.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut s = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                s += v * x[j];
            }
            *yi = s;
        }
    }

    /// `y = Aᵀ x` into a caller buffer.
    pub fn spmv_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
    }

    /// `r = b - A x`.
    pub fn residual(&self, b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, b.len())?;
        let mut r = self.spmv(x)?;
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        Ok(r)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut counts = vec![0usize; n + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let dst = next[j];
                col_idx[dst] = i;
                values[dst] = v;
                next[j] += 1;
            }
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Sparse product `A B` using a dense row accumulator.
    pub fn matmul(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        check_len(self.n, other.n)?;
        let n = self.n;
        let mut acc = vec![0.0; n];
        let mut marker = vec![usize::MAX; n];
        let mut row_cols: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            row_cols.clear();
            let (acols, avals) = self.row(i);
            for (&k, &a) in acols.iter().zip(avals) {
                let (bcols, bvals) = other.row(k);
                for (&j, &b) in bcols.iter().zip(bvals) {
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = 0.0;
                        row_cols.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            row_cols.sort_unstable();
            for &j in &row_cols {
                col_idx.push(j);
                values.push(acc[j]);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for (&j, v) in self.col_idx.iter().zip(&self.values) {
            sums[j] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// `Σ_j |a_ij|` for every row.
    pub fn row_abs_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum())
            .collect()
    }

    /// True when the stored matrix equals its transpose exactly.
    pub fn is_symmetric(&self) -> bool {
        let t = self.transpose();
        // Patterns may differ only by explicit zeros.
        (0..self.n).all(|i| {
            let (cols, vals) = self.row(i);
            let (tcols, tvals) = t.row(i);
            cols == tcols && vals == tvals
        })
    }

    /// Dense copy, refused beyond `cap` rows.
    pub fn to_dense(&self, cap: usize) -> Result<DenseMatrix> {
        if self.n > cap {
            return Err(Error::DenseCapExceeded { n: self.n, cap });
        }
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[(i, j)] = v;
            }
        }
        Ok(d)
    }

    /// Departure from normality `‖AAᵀ − AᵀA‖_F / ‖A‖_F²`.
    ///
    /// Computed with sparse products, so no dense cap applies. Returns exactly
    /// zero for matrices that equal their transpose.
    pub fn normality(&self) -> f64 {
        let fro = self.frobenius_norm();
        if fro == 0.0 || self.is_symmetric() {
            return 0.0;
        }
        let t = self.transpose();
        let aat = self.matmul(&t).expect("square");
        let ata = t.matmul(self).expect("square");
        let mut diff2 = 0.0;
        for i in 0..self.n {
            let (c1, v1) = aat.row(i);
            let (c2, v2) = ata.row(i);
            let (mut p, mut q) = (0, 0);
            while p < c1.len() || q < c2.len() {
                let d = match (c1.get(p), c2.get(q)) {
                    (Some(&a), Some(&b)) if a == b => {
                        p += 1;
                        q += 1;
                        v1[p - 1] - v2[q - 1]
                    }
                    (Some(&a), Some(&b)) if a < b => {
                        p += 1;
                        v1[p - 1]
                    }
                    (Some(_), None) => {
                        p += 1;
                        v1[p - 1]
                    }
                    _ => {
                        q += 1;
                        -v2[q - 1]
                    }
                };
                diff2 += d * d;
            }
        }
        diff2.sqrt() / (fro * fro)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_product(a: &DenseMatrix, x: &[f64]) -> Vec<f64> {
        (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
            .collect()
    }

    #[test]
    fn spmv_identity() {
        let y = CsrMatrix::identity(3).spmv(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(y, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spmv_diagonal() {
        let y = CsrMatrix::from_diagonal(&[2.0, 3.0]).spmv(&[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![2.0, 3.0]);
    }

    #[test]
    fn spmv_rejects_wrong_length() {
        let err = CsrMatrix::identity(3).spmv(&[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 3, found: 2 }));
    }

    #[test]
    fn spmv_matches_dense_product_on_random_fill() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut d = DenseMatrix::zeros(5, 5);
        for i in 0..5 {
            for j in 0..5 {
                if rng.gen_bool(0.4) {
                    d[(i, j)] = rng.gen_range(-1.0..1.0);
                }
            }
        }
        let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = CsrMatrix::from_dense(&d).unwrap();
        let y = a.spmv(&x).unwrap();
        let yd = dense_product(&d, &x);
        let scale = yd.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        for (u, v) in y.iter().zip(&yd) {
            assert!((u - v).abs() <= 1e-14 * scale);
        }
    }

    #[test]
    fn rejects_unsorted_columns() {
        let err = CsrMatrix::new(2, vec![0, 2, 2], vec![1, 0], vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidCsr(_)));
    }

    #[test]
    fn rejects_non_finite() {
        let err = CsrMatrix::new(1, vec![0, 1], vec![0], vec![f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::InvalidCsr(_)));
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, 4.0), (0, 0, 1.0)]).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 0), 2.0);
    }

    #[test]
    fn to_dense_diagonal_and_empty_row() {
        let d = CsrMatrix::from_diagonal(&[2.0, 3.0]).to_dense(10).unwrap();
        assert_eq!(d, DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]]));
        let a = CsrMatrix::new(2, vec![0, 1, 1], vec![1], vec![5.0]).unwrap();
        assert_eq!(a.to_dense(10).unwrap().row(1), &[0.0, 0.0]);
    }

    #[test]
    fn to_dense_respects_cap() {
        let err = CsrMatrix::identity(5).to_dense(4).unwrap_err();
        assert!(matches!(err, Error::DenseCapExceeded { n: 5, cap: 4 }));
    }

    #[test]
    fn dense_round_trip() {
        let d = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, -2.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.5, 3.0, 0.0, 1e-3],
            vec![0.0, 0.0, 7.0, 4.0],
        ]);
        let back = CsrMatrix::from_dense(&d).unwrap().to_dense(10).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn transpose_twice_is_identity() {
        let a = CsrMatrix::from_triplets(3, &[(0, 1, 1.0), (2, 0, 2.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().get(1, 0), 1.0);
    }

    #[test]
    fn normality_of_symmetric_and_identity() {
        assert_eq!(CsrMatrix::identity(4).normality(), 0.0);
        let s = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)])
            .unwrap();
        assert_eq!(s.normality(), 0.0);
    }

    #[test]
    fn normality_of_nilpotent_jordan_block() {
        // AAᵀ − AᵀA = diag(1, −1); Frobenius ratio √2 / 1.
        let a = CsrMatrix::from_triplets(2, &[(0, 1, 1.0)]).unwrap();
        assert!((a.normality() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn normality_matches_dense_oracle() {
        let d = DenseMatrix::from_rows(&[
            vec![1.0, 2.0, 0.0],
            vec![0.0, -1.0, 4.0],
            vec![3.0, 0.0, 0.5],
        ]);
        let dt = d.transpose();
        let mut diff2 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let aat: f64 = (0..3).map(|k| d[(i, k)] * dt[(k, j)]).sum();
                let ata: f64 = (0..3).map(|k| dt[(i, k)] * d[(k, j)]).sum();
                diff2 += (aat - ata).powi(2);
            }
        }
        let expected = diff2.sqrt() / d.frobenius_norm().powi(2);
        let got = CsrMatrix::from_dense(&d).unwrap().normality();
        assert!((got - expected).abs() < 1e-14);
    }
}
