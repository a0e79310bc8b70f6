//! Condition numbers of (composed) operators in the 1-norm.

use crate::dense::{DenseLu, DenseMatrix};
use crate::error::{Error, Result};
use crate::operator::{norm1, norm2, IdentityPreconditioner, LinearOperator, TransposeOperator, Transposed};
use crate::solvers::{pgmres, SolverConfig};

/// How a condition number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondMethod {
    DenseExact,
    OneNormEstimator,
}

impl std::fmt::Display for CondMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CondMethod::DenseExact => "dense-exact",
            CondMethod::OneNormEstimator => "1-norm-estimator",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    One,
    Two,
}

impl NormKind {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            NormKind::One => norm1(v),
            NormKind::Two => norm2(v),
        }
    }
}

/// `κ(B) = ‖B‖·‖B⁻¹‖`, always at least one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondEstimate {
    pub value: f64,
    pub method: CondMethod,
    pub norm: NormKind,
}

/// Applies `op` to every unit vector to obtain a dense copy.
pub fn materialize<A: LinearOperator + ?Sized>(op: &A, cap: usize) -> Result<DenseMatrix> {
    let n = op.dim();
    if n > cap {
        return Err(Error::DenseCapExceeded { n, cap });
    }
    let mut out = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        out.set_column(j, &col);
        e[j] = 0.0;
    }
    Ok(out)
}

/// `‖B‖₁·‖B⁻¹‖₁` from a dense materialization and its LU factors.
pub fn cond_exact<A: LinearOperator + ?Sized>(op: &A, cap: usize) -> Result<CondEstimate> {
    let dense = materialize(op, cap)?;
    cond_exact_dense(&dense)
}

pub fn cond_exact_dense(b: &DenseMatrix) -> Result<CondEstimate> {
    let lu = DenseLu::factorize(b)?;
    let value = b.norm1() * lu.inverse().norm1();
    if !value.is_finite() {
        return Err(Error::Singular);
    }
    Ok(CondEstimate {
        value: value.max(1.0),
        method: CondMethod::DenseExact,
        norm: NormKind::One,
    })
}

const ESTIMATOR_ITERS: usize = 5;

fn signs(y: &[f64]) -> Vec<f64> {
    y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect()
}

fn argmax_abs(z: &[f64]) -> usize {
    z.iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best })
        .0
}

/// Hager's sign-vector iteration with Higham's alternating test vector.
///
/// Returns a lower bound on `‖B‖₁` from at most five `B`/`Bᵀ` pairs plus one
/// extra product. `apply` computes `Bx`, `apply_t` computes `Bᵀx`.
pub fn onenorm_estimate<F, G>(n: usize, mut apply: F, mut apply_t: G) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if n == 0 {
        return Ok(0.0);
    }
    let y = apply(&vec![1.0 / n as f64; n])?;
    let mut est = norm1(&y);
    if n == 1 {
        return Ok(est);
    }
    let mut xi = signs(&y);
    let mut z = apply_t(&xi)?;
    let mut j = argmax_abs(&z);
    let mut e = vec![0.0; n];
    for _ in 1..ESTIMATOR_ITERS {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let y = apply(&e)?;
        let new_est = norm1(&y);
        let new_xi = signs(&y);
        if new_xi == xi || new_est <= est {
            est = est.max(new_est);
            break;
        }
        est = new_est;
        xi = new_xi;
        z = apply_t(&xi)?;
        let jlast = j;
        j = argmax_abs(&z);
        if z[jlast].abs() == z[j].abs() {
            break;
        }
    }
    let alt: Vec<f64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + i as f64 / (n - 1) as f64)
        })
        .collect();
    let y = apply(&alt)?;
    Ok(est.max(2.0 * norm1(&y) / (3.0 * n as f64)))
}

/// Supplies `B⁻¹x` and `B⁻ᵀx`.
pub trait InverseApply {
    fn solve(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn solve_transpose(&self, x: &[f64]) -> Result<Vec<f64>>;
}

impl InverseApply for DenseLu {
    fn solve(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(DenseLu::solve(self, x))
    }

    fn solve_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut v = x.to_vec();
        self.solve_transpose_in_place(&mut v);
        Ok(v)
    }
}

/// Inverse applications by GMRES on `B` and `Bᵀ`, with refinement.
pub struct KrylovInverse<'a, B: ?Sized> {
    op: &'a B,
    /// Required relative residual of every inner solve.
    pub accept_rtol: f64,
}

impl<'a, B: TransposeOperator + ?Sized> KrylovInverse<'a, B> {
    pub fn new(op: &'a B) -> Self {
        Self {
            op,
            accept_rtol: 1e-10,
        }
    }

    fn inner<O: LinearOperator + ?Sized>(&self, op: &O, x: &[f64]) -> Result<Vec<f64>> {
        let n = op.dim();
        let xnorm = norm2(x);
        if xnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let cfg = SolverConfig {
            restart: n.clamp(1, 100),
            max_iters: 20 * n.max(10),
            ..SolverConfig::with_tau(1e-14 * xnorm)
        };
        let mut y = pgmres(op, &IdentityPreconditioner, x, None, &cfg)?.solution;
        let mut by = vec![0.0; n];
        let mut achieved = f64::INFINITY;
        for _ in 0..3 {
            op.apply(&y, &mut by);
            let r: Vec<f64> = x.iter().zip(&by).map(|(a, b)| a - b).collect();
            achieved = norm2(&r) / xnorm;
            if achieved <= 1e-15 {
                break;
            }
            let d = pgmres(op, &IdentityPreconditioner, &r, None, &cfg)?.solution;
            for (yi, di) in y.iter_mut().zip(&d) {
                *yi += di;
            }
        }
        op.apply(&y, &mut by);
        let r: Vec<f64> = x.iter().zip(&by).map(|(a, b)| a - b).collect();
        achieved = achieved.min(norm2(&r) / xnorm);
        if achieved > self.accept_rtol {
            return Err(Error::InnerSolve {
                target: self.accept_rtol,
                achieved,
            });
        }
        Ok(y)
    }
}

impl<B: TransposeOperator + ?Sized> InverseApply for KrylovInverse<'_, B> {
    fn solve(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.inner(self.op, x)
    }

    fn solve_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.inner(&Transposed(self.op), x)
    }
}

/// Estimates `‖B‖₁·‖B⁻¹‖₁` without forming `B`.
///
/// Both factors are lower bounds, so the product never exceeds the exact
/// 1-norm condition number (up to rounding in the inverse applications).
pub fn cond_estimate_1norm<B, I>(op: &B, inverse: &I) -> Result<CondEstimate>
where
    B: TransposeOperator + ?Sized,
    I: InverseApply + ?Sized,
{
    let n = op.dim();
    let forward = onenorm_estimate(
        n,
        |x| {
            let mut y = vec![0.0; n];
            op.apply(x, &mut y);
            Ok(y)
        },
        |x| {
            let mut y = vec![0.0; n];
            op.apply_transpose(x, &mut y);
            Ok(y)
        },
    )?;
    let inv = onenorm_estimate(n, |x| inverse.solve(x), |x| inverse.solve_transpose(x))?;
    Ok(CondEstimate {
        value: (forward * inv).max(1.0),
        method: CondMethod::OneNormEstimator,
        norm: NormKind::One,
    })
}

/// [`cond_estimate_1norm`] with GMRES inner solves.
pub fn cond_estimate_1norm_krylov<B: TransposeOperator + ?Sized>(op: &B) -> Result<CondEstimate> {
    cond_estimate_1norm(op, &KrylovInverse::new(op))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CsrMatrix;

    #[test]
    fn identity_is_perfectly_conditioned() {
        let a = CsrMatrix::identity(6);
        assert_eq!(cond_exact(&a, 100).unwrap().value, 1.0);
        assert!((cond_estimate_1norm_krylov(&a).unwrap().value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_condition_is_ratio() {
        let a = CsrMatrix::from_diagonal(&[1.0, 10.0]);
        let exact = cond_exact(&a, 100).unwrap();
        assert_eq!(exact.value, 10.0);
        assert_eq!(exact.method, CondMethod::DenseExact);
        let est = cond_estimate_1norm_krylov(&a).unwrap();
        assert!((est.value - 10.0).abs() < 1e-12);
        assert_eq!(est.method, CondMethod::OneNormEstimator);
    }

    #[test]
    fn cap_is_enforced() {
        let a = CsrMatrix::identity(5);
        assert!(matches!(cond_exact(&a, 4), Err(Error::DenseCapExceeded { .. })));
    }

    #[test]
    fn singular_operator() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(matches!(cond_exact(&a, 10), Err(Error::Singular)));
    }

    #[test]
    fn estimator_on_dense_inverse() {
        let d = DenseMatrix::from_rows(&[
            vec![4.0, -1.0, 0.0],
            vec![2.0, 5.0, -3.0],
            vec![0.0, 1.0, 0.5],
        ]);
        let a = CsrMatrix::from_dense(&d).unwrap();
        let lu = DenseLu::factorize(&d).unwrap();
        let est = cond_estimate_1norm(&a, &lu).unwrap().value;
        let exact = cond_exact_dense(&d).unwrap().value;
        assert!(est <= exact * (1.0 + 1e-12));
        assert!(est >= 0.1 * exact);
    }
}
