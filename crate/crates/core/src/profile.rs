//! Structural and numerical summary of a coefficient matrix.

use crate::error_control::{cond_estimate_1norm_krylov, cond_exact, CondEstimate};
use crate::sparse::{CsrMatrix, DEFAULT_DENSE_CAP};

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixProfile {
    pub dimension: usize,
    pub nnz: usize,
    /// `100·nnz/n²`.
    pub sparsity_pct: f64,
    /// `‖AAᵀ − AᵀA‖_F / ‖A‖_F²`.
    pub normality: f64,
    pub cond_estimate: Option<CondEstimate>,
}

/// Profiles `a`; the condition number is `κ₁(A)` (dense below `dense_cap`).
///
/// A failed condition computation is logged and leaves `cond_estimate` empty.
pub fn profile_with_cap(a: &CsrMatrix, with_cond: bool, dense_cap: usize) -> MatrixProfile {
    let n = a.n();
    let cond_estimate = if with_cond {
        let res = if n <= dense_cap {
            cond_exact(a, dense_cap)
        } else {
            cond_estimate_1norm_krylov(a)
        };
        match res {
            Ok(c) => Some(c),
            Err(e) => {
                log::warn!("condition number unavailable: {e}");
                None
            }
        }
    } else {
        None
    };
    MatrixProfile {
        dimension: n,
        nnz: a.nnz(),
        sparsity_pct: if n == 0 {
            0.0
        } else {
            100.0 * a.nnz() as f64 / (n as f64 * n as f64)
        },
        normality: a.normality(),
        cond_estimate,
    }
}

pub fn profile(a: &CsrMatrix, with_cond: bool) -> MatrixProfile {
    profile_with_cap(a, with_cond, DEFAULT_DENSE_CAP)
}
