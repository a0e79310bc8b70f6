mod common;

use common::*;
use equisolve::operator::{LinearOperator, Preconditioned};
use equisolve::solvers::pgmres;
use equisolve::{ilut_factorize, CsrMatrix, IlutParams, ScalingMode, ScalingOp, SolverConfig};
use proptest::prelude::*;

fn tridiagonal(n: usize) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, 4.0));
        if i > 0 {
            t.push((i, i - 1, -1.0));
        }
        if i + 1 < n {
            t.push((i, i + 1, -1.5));
        }
    }
    CsrMatrix::from_triplets(n, &t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn abs_row_sum_rows_have_unit_one_norm(n in 1usize..40, seed in any::<u64>()) {
        let a = random_nonsingular(n, 0.2, seed);
        let d = ScalingOp::equilibrate(&a, ScalingMode::AbsRowSum).unwrap();
        let s = d.scale_matrix(&a).unwrap();
        for sum in s.row_abs_sums() {
            prop_assert!((sum - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn scaled_norm_is_norm_of_scaled_vector(n in 1usize..30, seed in any::<u64>()) {
        let a = random_nonsingular(n, 0.3, seed);
        let v = random_vector(n, seed);
        let d = ScalingOp::equilibrate(&a, ScalingMode::AbsRowSum).unwrap();
        let manual: Vec<f64> = v.iter().zip(d.diag()).map(|(x, di)| x / di).collect();
        prop_assert!((d.scaled_norm(&v).unwrap() - norm2(&manual)).abs() <= 1e-15 * norm2(&manual));
    }

    #[test]
    fn ilut_respects_fill_cap(n in 2usize..60, lfil in 0usize..6, droptol in 0.0f64..0.1, seed in any::<u64>()) {
        let a = random_nonsingular(n, 0.3, seed);
        let f = ilut_factorize(&a, IlutParams::new(droptol, lfil)).unwrap();
        for i in 0..n {
            prop_assert!(f.l().row(i).0.len() <= lfil);
            prop_assert!(f.u().row(i).0.len() <= lfil + 1);
            prop_assert_eq!(f.u().row(i).0[0], i);
            prop_assert!(f.l().row(i).0.iter().all(|&j| j < i));
        }
    }

    #[test]
    fn full_fill_ilut_is_exact_lu(n in 2usize..25, seed in any::<u64>()) {
        let a = random_nonsingular(n, 0.3, seed);
        let f = ilut_factorize(&a, IlutParams::new(0.0, n)).unwrap();
        let diff = to_na(&f.product()) - to_na(&a);
        prop_assert!(diff.amax() <= 1e-12 * to_na(&a).amax());
    }
}

#[test]
fn scaling_examples() {
    let a = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, 3.0), (1, 1, 1.0)]).unwrap();
    let d = ScalingOp::equilibrate(&a, ScalingMode::AbsRowSum).unwrap();
    assert_eq!(d.diag(), &[3.0, 4.0]);
    let d = ScalingOp::equilibrate(&a, ScalingMode::AbsOfRowSum).unwrap();
    assert_eq!(d.diag(), &[1.0, 4.0]);
    let cancel = CsrMatrix::from_triplets(1, &[(0, 0, 0.0)]).unwrap();
    assert!(ScalingOp::equilibrate(&cancel, ScalingMode::AbsRowSum).is_err());
}

#[test]
fn exact_ilut_gives_identity_operator() {
    let n = 200;
    let a = tridiagonal(n);
    let f = ilut_factorize(&a, IlutParams::new(0.0, n)).unwrap();
    let b = Preconditioned::new(&a, &f);
    let x = random_vector(n, 3);
    let mut y = vec![0.0; n];
    b.apply(&x, &mut y);
    assert!(rel_diff(&y, &x) < 1e-13);
    let rhs = a.spmv(&x).unwrap();
    let rep = pgmres(&a, &f, &rhs, None, &SolverConfig::with_tau(1e-10 * norm2(&x))).unwrap();
    assert!(rep.converged());
    assert_eq!(rep.iterations, 1);
}
