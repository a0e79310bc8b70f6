#![allow(dead_code)]

use equisolve::CsrMatrix;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sparse matrix with roughly `fill` density; entries in [-1, 1].
pub fn random_sparse(n: usize, fill: f64, seed: u64) -> CsrMatrix {
    let mut r = rng(seed);
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if r.gen_bool(fill) {
                t.push((i, j, r.gen_range(-1.0..1.0)));
            }
        }
    }
    CsrMatrix::from_triplets(n, &t).unwrap()
}

/// Random nonsingular matrix: sparse noise plus a dominant diagonal.
pub fn random_nonsingular(n: usize, fill: f64, seed: u64) -> CsrMatrix {
    let mut r = rng(seed ^ 0x9e37_79b9);
    let a = random_sparse(n, fill, seed);
    let sums = a.row_abs_sums();
    let d: Vec<f64> = sums
        .iter()
        .map(|s| {
            let sign = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
            sign * (s * r.gen_range(0.6..1.5) + 0.1)
        })
        .collect();
    a.add_diagonal(&d).unwrap()
}

pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed.wrapping_add(17));
    (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()
}

pub fn to_na(a: &CsrMatrix) -> DMatrix<f64> {
    let n = a.n();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let (c, v) = a.row(i);
        for (&j, &x) in c.iter().zip(v) {
            m[(i, j)] = x;
        }
    }
    m
}

pub fn na_solve(a: &CsrMatrix, b: &[f64]) -> Vec<f64> {
    let lu = to_na(a).lu();
    lu.solve(&DVector::from_column_slice(b)).unwrap().as_slice().to_vec()
}

/// `‖B‖₁` of a dense nalgebra matrix.
pub fn na_norm1(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&d) / norm2(b)
}
