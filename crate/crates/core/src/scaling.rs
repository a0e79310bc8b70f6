//! Row equilibration `D` and the scaled norm `‖v‖_* = ‖D⁻¹v‖₂`.

use crate::error::{check_len, Error, Result};
use crate::sparse::CsrMatrix;

/// How the diagonal of `D` is formed from the rows of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ScalingMode {
    /// `d_i = Σ_j |a_ij|`, infinity-norm row equilibration.
    #[default]
    AbsRowSum,
    /// `d_i = |Σ_j a_ij|`, i.e. `|Ae|_i`.
    AbsOfRowSum,
    /// `D = I`.
    None,
}

impl ScalingMode {
    pub fn is_scaled(self) -> bool {
        self != ScalingMode::None
    }
}

impl std::fmt::Display for ScalingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScalingMode::AbsRowSum => "abs-row-sum",
            ScalingMode::AbsOfRowSum => "abs-of-row-sum",
            ScalingMode::None => "none",
        })
    }
}

/// Diagonal left scaling `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingOp {
    diag: Vec<f64>,
    mode: ScalingMode,
}

impl ScalingOp {
    pub fn identity(n: usize) -> Self {
        Self {
            diag: vec![1.0; n],
            mode: ScalingMode::None,
        }
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn mode(&self) -> ScalingMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Builds `D` for `a`. Fails on a row whose scale would be zero.
    pub fn equilibrate(a: &CsrMatrix, mode: ScalingMode) -> Result<Self> {
        let n = a.n();
        let diag = match mode {
            ScalingMode::None => vec![1.0; n],
            ScalingMode::AbsRowSum => a.row_abs_sums(),
            ScalingMode::AbsOfRowSum => (0..n)
                .map(|i| a.row(i).1.iter().sum::<f64>().abs())
                .collect(),
        };
        if let Some(row) = diag.iter().position(|&d| d == 0.0 || !d.is_finite()) {
            let reason = match mode {
                ScalingMode::AbsOfRowSum => "has zero row sum",
                _ => "has no nonzero entry",
            };
            return Err(Error::Scaling { row, reason });
        }
        Ok(Self { diag, mode })
    }

    /// `D⁻¹v`.
    pub fn scale_vector(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), v.len())?;
        Ok(v.iter().zip(&self.diag).map(|(x, d)| x / d).collect())
    }

    /// Returns `(D⁻¹A, D⁻¹b)` with the sparsity pattern of `A` unchanged.
    pub fn apply_left(&self, a: &CsrMatrix, b: &[f64]) -> Result<(CsrMatrix, Vec<f64>)> {
        check_len(self.n(), a.n())?;
        let sb = self.scale_vector(b)?;
        Ok((self.scale_matrix(a)?, sb))
    }

    pub fn scale_matrix(&self, a: &CsrMatrix) -> Result<CsrMatrix> {
        check_len(self.n(), a.n())?;
        let mut values = a.values().to_vec();
        let rp = a.row_ptr();
        for (i, d) in self.diag.iter().enumerate() {
            for v in &mut values[rp[i]..rp[i + 1]] {
                *v /= d;
            }
        }
        Ok(a.with_values(values))
    }

    /// `‖D⁻¹v‖₂`.
    pub fn scaled_norm(&self, v: &[f64]) -> Result<f64> {
        check_len(self.n(), v.len())?;
        Ok(v.iter()
            .zip(&self.diag)
            .map(|(x, d)| (x / d).powi(2))
            .sum::<f64>()
            .sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, -2.0), (1, 0, 1.0), (1, 1, 3.0)]).unwrap()
    }

    #[test]
    fn abs_row_sum() {
        let s = ScalingOp::equilibrate(&sample(), ScalingMode::AbsRowSum).unwrap();
        assert_eq!(s.diag(), &[4.0, 4.0]);
    }

    #[test]
    fn abs_of_row_sum_rejects_cancelling_row() {
        let err = ScalingOp::equilibrate(&sample(), ScalingMode::AbsOfRowSum).unwrap_err();
        assert!(matches!(err, Error::Scaling { row: 0, .. }));
    }

    #[test]
    fn zero_row_is_rejected() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0)]).unwrap();
        let err = ScalingOp::equilibrate(&a, ScalingMode::AbsRowSum).unwrap_err();
        assert!(matches!(err, Error::Scaling { row: 1, .. }));
    }

    #[test]
    fn identity_matrix_gives_unit_scaling() {
        let s = ScalingOp::equilibrate(&CsrMatrix::identity(3), ScalingMode::AbsRowSum).unwrap();
        assert_eq!(s.diag(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn apply_left_divides_rows() {
        let a = sample();
        let s = ScalingOp::equilibrate(&a, ScalingMode::AbsRowSum).unwrap();
        let (sa, sb) = s.apply_left(&a, &[4.0, 8.0]).unwrap();
        assert_eq!(sa.values(), &[0.5, -0.5, 0.25, 0.75]);
        assert_eq!(sb, vec![1.0, 2.0]);
        assert_eq!(sa.col_idx(), a.col_idx());
        assert_eq!(sa.row_ptr(), a.row_ptr());
        assert_eq!(a.values(), &[2.0, -2.0, 1.0, 3.0]);
    }

    #[test]
    fn identity_scaling_leaves_matrix() {
        let a = sample();
        let (sa, _) = ScalingOp::identity(2).apply_left(&a, &[1.0, 1.0]).unwrap();
        assert_eq!(sa, a);
    }

    #[test]
    fn scaled_norm_values() {
        assert_eq!(ScalingOp::identity(2).scaled_norm(&[3.0, 4.0]).unwrap(), 5.0);
        let d = ScalingOp::equilibrate(&CsrMatrix::from_diagonal(&[2.0, 2.0]), ScalingMode::AbsRowSum)
            .unwrap();
        assert_eq!(d.scaled_norm(&[3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(d.scaled_norm(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(d.scaled_norm(&[1.0]).is_err());
    }
}
