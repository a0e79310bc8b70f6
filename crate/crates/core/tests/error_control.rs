mod common;

use common::*;
use equisolve::dense::DenseLu;
use equisolve::error_control::{
    cond_estimate_1norm, cond_estimate_1norm_krylov, cond_exact, error_study, nearby_system, CondMethod,
    NormKind, StudyOptions,
};
use equisolve::testgen::{generate, spec_suite, suite_member};
use equisolve::{CsrMatrix, ScalingMode, ScalingOp};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimator_is_a_sound_lower_bound(n in 2usize..100, seed in any::<u64>()) {
        let a = random_nonsingular(n, 0.1, seed);
        let exact = cond_exact(&a, 2000).unwrap().value;
        let lu = DenseLu::factorize(&a.to_dense(2000).unwrap()).unwrap();
        let est = cond_estimate_1norm(&a, &lu).unwrap().value;
        prop_assert!(est <= exact * (1.0 + 1e-10));
        prop_assert!(est >= 0.1 * exact);
    }

    #[test]
    fn bound_holds_on_random_systems(n in 3usize..40, seed in any::<u64>()) {
        let a = random_nonsingular(n, 0.25, seed);
        let b = random_vector(n, seed);
        let opts = StudyOptions { taus: vec![1e-1, 1e-3, 1e-6], ..StudyOptions::default() };
        for row in error_study(&a, &b, &opts).unwrap() {
            prop_assert_eq!(row.cond.method, CondMethod::DenseExact);
            // Below ~1e-14 both sides are rounding noise of the reference solution.
            if row.converged {
                prop_assert!(row.exact_rel_err <= row.ferr + 1e-14, "{:?}", row);
            }
        }
    }
}

#[test]
fn dense_condition_matches_explicit_inverse() {
    for seed in 0..5 {
        let a = random_nonsingular(20, 0.3, seed);
        let m = to_na(&a);
        let oracle = na_norm1(&m) * na_norm1(&m.clone().try_inverse().unwrap());
        let got = cond_exact(&a, 100).unwrap().value;
        assert!((got - oracle).abs() <= 1e-10 * oracle);
    }
}

#[test]
fn krylov_estimator_on_diagonal_and_random() {
    let d = CsrMatrix::from_diagonal(&[1.0, 10.0]);
    assert!((cond_estimate_1norm_krylov(&d).unwrap().value - 10.0).abs() < 1e-12);
    let a = random_nonsingular(50, 0.1, 11);
    let exact = cond_exact(&a, 100).unwrap().value;
    let est = cond_estimate_1norm_krylov(&a).unwrap().value;
    assert!(est <= exact * (1.0 + 1e-8) && est >= 0.1 * exact);
}

#[test]
fn nearby_system_defines_an_exact_solution() {
    let a = random_nonsingular(30, 0.2, 5);
    let b = random_vector(30, 5);
    let ns = nearby_system(&a, &b, ScalingMode::AbsRowSum, 100).unwrap();
    let r = a.residual(&ns.rhs, &ns.solution).unwrap();
    assert!(norm2(&r) <= 1e-15 * norm2(&ns.rhs));
    assert!(rel_diff(&ns.solution, &na_solve(&a, &b)) < 1e-12);
}

#[test]
fn iterative_reference_agrees_with_dense_reference() {
    let p = generate(&suite_member("ILL6").unwrap()).unwrap();
    let dense = nearby_system(&p.matrix, &p.rhs, ScalingMode::AbsRowSum, 2000).unwrap();
    let krylov = nearby_system(&p.matrix, &p.rhs, ScalingMode::AbsRowSum, 0).unwrap();
    assert!(rel_diff(&krylov.solution, &dense.solution) < 1e-11);
}

#[test]
fn estimator_path_pairs_with_two_norm_vectors() {
    let p = generate(&suite_member("WELL").unwrap()).unwrap();
    let opts = StudyOptions { taus: vec![1e-2, 1e-6], dense_cap: 0, ..StudyOptions::default() };
    let rows = error_study(&p.matrix, &p.rhs, &opts).unwrap();
    for r in &rows {
        assert_eq!(r.cond.method, CondMethod::OneNormEstimator);
        assert_eq!(r.vector_norm, NormKind::Two);
        assert!(r.converged && r.ferr.is_finite() && r.ferr > 0.0);
    }
}

#[test]
fn suite_study_invariants() {
    for spec in spec_suite() {
        let p = generate(&spec).unwrap();
        let rows = error_study(&p.matrix, &p.rhs, &StudyOptions::default()).unwrap();
        assert_eq!(rows.len(), 16);
        for scaled in [true, false] {
            let mode = if scaled { ScalingMode::AbsRowSum } else { ScalingMode::None };
            let ns = nearby_system(&p.matrix, &p.rhs, mode, 2000).unwrap();
            let star = ScalingOp::equilibrate(&p.matrix, mode).unwrap().scaled_norm(&ns.rhs).unwrap();
            let block: Vec<_> = rows.iter().filter(|r| r.scaled == scaled).collect();
            for r in &block {
                assert!(r.converged && r.failure.is_none());
                assert!(r.exact_rel_err > 0.0 && r.ferr.is_finite() && r.epsilon > 0.0);
                assert!((r.epsilon * star - r.tau).abs() <= 1e-15 * r.tau, "{}", spec.name);
            }
            for w in block.windows(2) {
                assert!(w[1].exact_rel_err <= w[0].exact_rel_err, "{} not monotone", spec.name);
            }
        }
    }
}

#[test]
fn row_scaling_brings_ferr_to_the_order_of_epsilon() {
    for name in ["ILL6", "ILL9"] {
        let p = generate(&suite_member(name).unwrap()).unwrap();
        let rows = error_study(&p.matrix, &p.rhs, &StudyOptions::default()).unwrap();
        let max_log = |scaled: bool| {
            rows.iter()
                .filter(|r| r.scaled == scaled)
                .map(|r| (r.ferr / r.epsilon).log10())
                .fold(f64::NEG_INFINITY, f64::max)
        };
        assert!(max_log(true) + 4.0 <= max_log(false), "{name}");
    }
}

#[test]
fn identity_study_is_trivial() {
    let b = vec![3.0, -1.0, 2.0];
    for r in error_study(&CsrMatrix::identity(3), &b, &StudyOptions::default()).unwrap() {
        assert!(r.exact_rel_err <= 1e-14);
        assert!(r.ferr <= 1e-14);
    }
}
