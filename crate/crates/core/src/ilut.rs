//! Threshold incomplete LU (ILUT) with a per-row fill cap.
//!
//! Rows are eliminated in IKJ order. While row `i` is processed, a
//! multiplier or fill entry smaller than `droptol·‖a_i‖₂` (the 2-norm of the
//! original row) is discarded; afterwards only the `lfil` largest entries of
//! the strictly lower part and the `lfil` largest of the strictly upper part
//! are kept. The diagonal of `U` is always kept and no pivoting is done.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{check_len, Error, Result};
use crate::operator::{Preconditioner, TransposePreconditioner};
use crate::sparse::CsrMatrix;

/// Factorization parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlutParams {
    pub droptol: f64,
    pub lfil: usize,
    /// Replace a zero pivot by `1e-12·‖a_i‖₂` instead of failing.
    pub pivot_shift: bool,
}

impl Default for IlutParams {
    fn default() -> Self {
        Self {
            droptol: 0.01,
            lfil: 10,
            pivot_shift: false,
        }
    }
}

impl IlutParams {
    pub fn new(droptol: f64, lfil: usize) -> Self {
        Self {
            droptol,
            lfil,
            pivot_shift: false,
        }
    }
}

/// Incomplete factors with `M = L̂Û`.
///
/// `l` holds only the strictly lower part (its unit diagonal is implicit);
/// `u` is upper triangular with the diagonal stored first in every row.
#[derive(Debug, Clone)]
pub struct IlutFactors {
    l: CsrMatrix,
    u: CsrMatrix,
    params: IlutParams,
}

impl IlutFactors {
    pub fn l(&self) -> &CsrMatrix {
        &self.l
    }

    pub fn u(&self) -> &CsrMatrix {
        &self.u
    }

    pub fn params(&self) -> IlutParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.u.n()
    }

    pub fn nnz(&self) -> usize {
        self.l.nnz() + self.u.nnz()
    }

    /// The identity preconditioner expressed as factors.
    pub fn identity(n: usize) -> Self {
        Self {
            l: CsrMatrix::from_parts_unchecked(n, vec![0; n + 1], Vec::new(), Vec::new()),
            u: CsrMatrix::identity(n),
            params: IlutParams::new(0.0, 0),
        }
    }

    /// Forms `L̂Û` explicitly.
    pub fn product(&self) -> CsrMatrix {
        let n = self.n();
        let mut trip = Vec::new();
        for i in 0..n {
            let (lc, lv) = self.l.row(i);
            let (uc, uv) = self.u.row(i);
            for (&j, &v) in uc.iter().zip(uv) {
                trip.push((i, j, v));
            }
            for (&k, &lik) in lc.iter().zip(lv) {
                let (uc, uv) = self.u.row(k);
                for (&j, &ukj) in uc.iter().zip(uv) {
                    trip.push((i, j, lik * ukj));
                }
            }
        }
        CsrMatrix::from_triplets(n, &trip).expect("factor entries are finite")
    }

    /// `w = Û⁻¹(L̂⁻¹v)`.
    pub fn solve(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), v.len())?;
        let mut w = vec![0.0; v.len()];
        self.apply_inverse(v, &mut w);
        Ok(w)
    }
}

/// Computes ILUT factors of `a`.
pub fn ilut_factorize(a: &CsrMatrix, params: IlutParams) -> Result<IlutFactors> {
    if !(params.droptol >= 0.0) || !params.droptol.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "droptol must be finite and non-negative, got {}",
            params.droptol
        )));
    }
    let n = a.n();
    let lfil = params.lfil;

    let mut l_ptr = Vec::with_capacity(n + 1);
    let mut l_col = Vec::new();
    let mut l_val: Vec<f64> = Vec::new();
    let mut u_ptr = Vec::with_capacity(n + 1);
    let mut u_col = Vec::new();
    let mut u_val: Vec<f64> = Vec::new();
    l_ptr.push(0);
    u_ptr.push(0);

    let mut w = vec![0.0; n];
    let mut marker = vec![usize::MAX; n];
    let mut lower: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
    let mut upper: Vec<usize> = Vec::new();
    let mut kept_lower: Vec<(usize, f64)> = Vec::new();
    let mut kept_upper: Vec<(usize, f64)> = Vec::new();

    for i in 0..n {
        let (cols, vals) = a.row(i);
        let tnorm = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
        let thresh = params.droptol * tnorm;

        lower.clear();
        upper.clear();
        kept_lower.clear();
        kept_upper.clear();
        marker[i] = i;
        w[i] = 0.0;
        for (&j, &v) in cols.iter().zip(vals) {
            marker[j] = i;
            w[j] = v;
            if j < i {
                lower.push(Reverse(j));
            } else if j > i {
                upper.push(j);
            }
        }

        while let Some(Reverse(k)) = lower.pop() {
            let (uc, uv) = (&u_col[u_ptr[k]..u_ptr[k + 1]], &u_val[u_ptr[k]..u_ptr[k + 1]]);
            let mult = w[k] / uv[0];
            if mult.abs() < thresh || mult == 0.0 {
                continue;
            }
            kept_lower.push((k, mult));
            for (&j, &ukj) in uc[1..].iter().zip(&uv[1..]) {
                if marker[j] != i {
                    marker[j] = i;
                    w[j] = 0.0;
                    if j < i {
                        lower.push(Reverse(j));
                    } else if j > i {
                        upper.push(j);
                    }
                }
                w[j] -= mult * ukj;
            }
        }

        keep_largest(&mut kept_lower, lfil);
        for &(j, v) in &kept_lower {
            l_col.push(j);
            l_val.push(v);
        }
        l_ptr.push(l_col.len());

        let mut diag = w[i];
        if diag == 0.0 || !diag.is_finite() {
            if params.pivot_shift && diag == 0.0 {
                diag = if tnorm > 0.0 { 1e-12 * tnorm } else { 1e-12 };
            } else {
                return Err(Error::ZeroPivot { row: i });
            }
        }
        kept_upper.extend(
            upper
                .iter()
                .map(|&j| (j, w[j]))
                .filter(|&(_, v)| v != 0.0 && v.abs() >= thresh),
        );
        keep_largest(&mut kept_upper, lfil);
        u_col.push(i);
        u_val.push(diag);
        for &(j, v) in &kept_upper {
            u_col.push(j);
            u_val.push(v);
        }
        u_ptr.push(u_col.len());
    }

    let l = CsrMatrix::from_parts_unchecked(n, l_ptr, l_col, l_val);
    let u = CsrMatrix::from_parts_unchecked(n, u_ptr, u_col, u_val);
    Ok(IlutFactors { l, u, params })
}

/// Keeps the `cap` entries of largest magnitude, sorted by column.
fn keep_largest(entries: &mut Vec<(usize, f64)>, cap: usize) {
    if entries.len() > cap {
        if cap == 0 {
            entries.clear();
            return;
        }
        entries.select_nth_unstable_by(cap - 1, |a, b| b.1.abs().total_cmp(&a.1.abs()));
        entries.truncate(cap);
    }
    entries.sort_unstable_by_key(|e| e.0);
}

impl Preconditioner for IlutFactors {
    fn apply_inverse(&self, v: &[f64], w: &mut [f64]) {
        let n = self.n();
        assert_eq!(v.len(), n);
        // L̂ z = v
        for i in 0..n {
            let (cols, vals) = self.l.row(i);
            let mut s = v[i];
            for (&j, &lij) in cols.iter().zip(vals) {
                s -= lij * w[j];
            }
            w[i] = s;
        }
        // Û w = z
        for i in (0..n).rev() {
            let (cols, vals) = self.u.row(i);
            let mut s = w[i];
            for (&j, &uij) in cols[1..].iter().zip(&vals[1..]) {
                s -= uij * w[j];
            }
            w[i] = s / vals[0];
        }
    }
}

impl TransposePreconditioner for IlutFactors {
    fn apply_inverse_transpose(&self, v: &[f64], w: &mut [f64]) {
        let n = self.n();
        assert_eq!(v.len(), n);
        w.copy_from_slice(v);
        // Ûᵀ t = v
        for i in 0..n {
            let (cols, vals) = self.u.row(i);
            w[i] /= vals[0];
            let ti = w[i];
            for (&j, &uij) in cols[1..].iter().zip(&vals[1..]) {
                w[j] -= uij * ti;
            }
        }
        // L̂ᵀ w = t
        for i in (0..n).rev() {
            let (cols, vals) = self.l.row(i);
            let wi = w[i];
            for (&j, &lij) in cols.iter().zip(vals) {
                w[j] -= lij * wi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{DenseLu, DenseMatrix};

    fn tridiagonal(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0 + (i % 3) as f64));
            if i > 0 {
                t.push((i, i - 1, -1.0 - 0.1 * i as f64 / n as f64));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.5));
            }
        }
        CsrMatrix::from_triplets(n, &t).unwrap()
    }

    #[test]
    fn diagonal_matrix_factors_trivially() {
        let a = CsrMatrix::from_diagonal(&[2.0, -3.0, 5.0]);
        for params in [IlutParams::default(), IlutParams::new(0.5, 0)] {
            let f = ilut_factorize(&a, params).unwrap();
            assert_eq!(f.l().nnz(), 0);
            assert_eq!(f.u(), &a);
        }
    }

    #[test]
    fn exact_lu_of_two_by_two() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)])
            .unwrap();
        let f = ilut_factorize(&a, IlutParams::new(0.0, 1)).unwrap();
        assert_eq!(f.l().get(1, 0), 0.25);
        assert_eq!(f.u().get(0, 0), 4.0);
        assert_eq!(f.u().get(0, 1), 1.0);
        assert_eq!(f.u().get(1, 1), 2.75);
        let w = f.solve(&[1.0, 2.0]).unwrap();
        assert!((w[0] - 1.0 / 11.0).abs() < 1e-15);
        assert!((w[1] - 7.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn tridiagonal_is_factored_exactly() {
        let n = 10;
        let a = tridiagonal(n);
        let f = ilut_factorize(&a, IlutParams::new(0.0, 1)).unwrap();
        let dense_a = a.to_dense(n).unwrap();
        // M⁻¹A column by column against the identity.
        for j in 0..n {
            let mut col = vec![0.0; n];
            for i in 0..n {
                col[i] = dense_a[(i, j)];
            }
            let z = f.solve(&col).unwrap();
            for (i, zi) in z.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((zi - e).abs() < 1e-13, "({i},{j}) = {zi}");
            }
        }
    }

    #[test]
    fn identity_factors_pass_through() {
        let f = IlutFactors::identity(3);
        assert_eq!(f.solve(&[1.0, -2.0, 3.0]).unwrap(), vec![1.0, -2.0, 3.0]);
    }

    #[test]
    fn diagonal_factors_divide() {
        let f = ilut_factorize(&CsrMatrix::from_diagonal(&[2.0, 4.0]), IlutParams::default())
            .unwrap();
        assert_eq!(f.solve(&[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn zero_pivot_names_row() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)])
            .unwrap();
        let err = ilut_factorize(&a, IlutParams::new(0.0, 5)).unwrap_err();
        assert!(matches!(err, Error::ZeroPivot { row: 1 }));
        let shifted = IlutParams {
            pivot_shift: true,
            ..IlutParams::new(0.0, 5)
        };
        let f = ilut_factorize(&a, shifted).unwrap();
        assert!(f.u().get(1, 1) > 0.0);
    }

    #[test]
    fn transpose_solve_matches_dense() {
        let a = CsrMatrix::from_triplets(
            3,
            &[(0, 0, 4.0), (0, 2, 1.0), (1, 0, -1.0), (1, 1, 5.0), (2, 1, 2.0), (2, 2, 6.0)],
        )
        .unwrap();
        let f = ilut_factorize(&a, IlutParams::new(0.0, 3)).unwrap();
        let at = a.to_dense(3).unwrap().transpose();
        let lu = DenseLu::factorize(&at).unwrap();
        let v = [1.0, -2.0, 0.5];
        let mut w = vec![0.0; 3];
        f.apply_inverse_transpose(&v, &mut w);
        let expected = lu.solve(&v);
        for (x, y) in w.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn full_fill_reproduces_dominant_matrix() {
        let d = DenseMatrix::from_rows(&[
            vec![10.0, 1.0, 2.0, 0.0, 1.0],
            vec![1.0, 9.0, 0.0, 3.0, 0.0],
            vec![0.5, 2.0, 12.0, 1.0, 1.0],
            vec![1.0, 0.0, 2.0, 8.0, 2.0],
            vec![3.0, 1.0, 0.0, 1.0, 11.0],
        ]);
        let a = CsrMatrix::from_dense(&d).unwrap();
        let f = ilut_factorize(&a, IlutParams::new(0.0, 5)).unwrap();
        let p = f.product().to_dense(5).unwrap();
        let mut diff = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                diff += (p[(i, j)] - d[(i, j)]).powi(2);
            }
        }
        assert!(diff.sqrt() <= 1e-12 * d.frobenius_norm());
    }
}
