//! Callback interfaces between the solvers and the matrix/preconditioner.
//!
//! The solvers never look inside `A` or `M`; they only request products and
//! preconditioner solves through these traits, so any storage format or
//! external kernel can be plugged in.

use crate::sparse::CsrMatrix;

/// Supplies `y ← A·x` for a square operator of order `dim`.
///
/// Implementations must be deterministic: the same `x` gives the same `y`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Operators that can also apply their transpose.
pub trait TransposeOperator: LinearOperator {
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);
}

/// Supplies `y ← M⁻¹·x`.
pub trait Preconditioner {
    fn apply_inverse(&self, x: &[f64], y: &mut [f64]);
}

/// Supplies `y ← M⁻ᵀ·x`.
pub trait TransposePreconditioner: Preconditioner {
    fn apply_inverse_transpose(&self, x: &[f64], y: &mut [f64]);
}

/// `M = I`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply_inverse(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

impl TransposePreconditioner for IdentityPreconditioner {
    fn apply_inverse_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.spmv_into(x, y);
    }
}

impl TransposeOperator for CsrMatrix {
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.spmv_transpose_into(x, y);
    }
}

/// Wraps a closure as an operator.
pub struct FnOperator<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

/// The composed operator `B = M⁻¹A`.
///
/// With `A` already row-scaled this is the `M⁻¹D⁻¹A` whose condition number
/// enters the forward-error bound.
pub struct Preconditioned<'a, A: ?Sized, M: ?Sized> {
    pub a: &'a A,
    pub m: &'a M,
}

impl<'a, A: ?Sized, M: ?Sized> Preconditioned<'a, A, M> {
    pub fn new(a: &'a A, m: &'a M) -> Self {
        Self { a, m }
    }
}

impl<A, M> LinearOperator for Preconditioned<'_, A, M>
where
    A: LinearOperator + ?Sized,
    M: Preconditioner + ?Sized,
{
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut t = vec![0.0; x.len()];
        self.a.apply(x, &mut t);
        self.m.apply_inverse(&t, y);
    }
}

impl<A, M> TransposeOperator for Preconditioned<'_, A, M>
where
    A: TransposeOperator + ?Sized,
    M: TransposePreconditioner + ?Sized,
{
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        let mut t = vec![0.0; x.len()];
        self.m.apply_inverse_transpose(x, &mut t);
        self.a.apply_transpose(&t, y);
    }
}

/// View of an operator's transpose as an operator in its own right.
pub struct Transposed<'a, T: ?Sized>(pub &'a T);

impl<T: TransposeOperator + ?Sized> LinearOperator for Transposed<'_, T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply_transpose(x, y);
    }
}

impl<T: TransposeOperator + ?Sized> TransposeOperator for Transposed<'_, T> {
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply(x, y);
    }
}

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}
