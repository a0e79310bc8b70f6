mod common;

use common::*;
use equisolve::dense::DenseMatrix;
use equisolve::operator::IdentityPreconditioner;
use equisolve::solvers::{hessenberg_lsq, pgmres, sor, PreparedSystem};
use equisolve::testgen::{generate, spec_suite, ProblemSpec};
use equisolve::{IlutParams, ScalingMode, SolverConfig, SolverKind};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn preconditioned_residual(sys: &PreparedSystem, x: &[f64]) -> f64 {
    let r = sys.matrix.residual(&sys.rhs, x).unwrap();
    norm2(&sys.precondition(&r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn hessenberg_lsq_matches_normal_equations(vals in prop::collection::vec(-2.0f64..2.0, 12), beta in 0.1f64..5.0) {
        let mut h = DenseMatrix::zeros(4, 3);
        let mut k = 0;
        for j in 0..3 {
            for i in 0..=(j + 1) {
                h[(i, j)] = vals[k] + if i == j { 3.0 } else { 0.0 };
                k += 1;
            }
        }
        let (y, gamma) = hessenberg_lsq(&h, beta).unwrap();
        let hm = DMatrix::from_fn(4, 3, |i, j| h[(i, j)]);
        let mut rhs = DVector::zeros(4);
        rhs[0] = beta;
        let oracle = (hm.transpose() * &hm).lu().solve(&(hm.transpose() * &rhs)).unwrap();
        for (a, b) in y.iter().zip(oracle.iter()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        let res = (rhs - hm * DVector::from_column_slice(&y)).norm();
        prop_assert!((gamma - res).abs() <= 1e-12 * beta);
    }

    #[test]
    fn unrestarted_gmres_terminates_within_n(n in 2usize..50, seed in any::<u64>()) {
        let a = random_nonsingular(n, 0.3, seed);
        let b = random_vector(n, seed);
        let beta = norm2(&b);
        let cfg = SolverConfig { restart: n, max_iters: n, ..SolverConfig::with_tau(1e-10 * beta) };
        let rep = pgmres(&a, &IdentityPreconditioner, &b, None, &cfg).unwrap();
        prop_assert!(rep.converged());
        prop_assert!(rep.iterations <= n);
    }
}

#[test]
fn hessenberg_examples() {
    let h = DenseMatrix::from_rows(&[vec![3.0], vec![4.0]]);
    let (y, g) = hessenberg_lsq(&h, 5.0).unwrap();
    assert!((y[0] - 0.6).abs() < 1e-15 && (g - 4.0).abs() < 1e-15);
    let h = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]);
    assert_eq!(hessenberg_lsq(&h, 2.0).unwrap(), (vec![2.0], 0.0));
}

#[test]
fn gamma_tracks_true_preconditioned_residual() {
    for spec in spec_suite() {
        let p = generate(&spec).unwrap();
        let sys = PreparedSystem::new(&p.matrix, &p.rhs, ScalingMode::AbsRowSum, Some(IlutParams::default()))
            .unwrap();
        let beta = preconditioned_residual(&sys, &vec![0.0; p.matrix.n()]);
        for budget in [1, 3, 7, 20, 25, 60] {
            let cfg = SolverConfig { max_iters: budget, ..SolverConfig::with_tau(1e-12) };
            let rep = sys.solve(SolverKind::Pgmres, &cfg).unwrap().report;
            let truth = preconditioned_residual(&sys, &rep.solution);
            assert!(
                (rep.final_residual - truth).abs() <= 1e-8 * beta,
                "{} budget {budget}: γ={} true={}",
                spec.name,
                rep.final_residual,
                truth
            );
        }
    }
}

#[test]
fn gamma_monotone_within_cycles_and_basis_orthonormal() {
    for spec in spec_suite() {
        let p = generate(&spec).unwrap();
        let sys = PreparedSystem::new(&p.matrix, &p.rhs, ScalingMode::AbsRowSum, Some(IlutParams::new(0.1, 2)))
            .unwrap();
        let cfg = SolverConfig { restart: 10, track_orthogonality: true, ..SolverConfig::with_tau(1e-12) };
        let rep = sys.solve(SolverKind::Pgmres, &cfg).unwrap().report;
        assert!(rep.restarts > 0, "{} should restart", spec.name);
        let mut bounds = rep.cycle_starts.clone();
        bounds.push(rep.gamma_history.len());
        for w in bounds.windows(2) {
            let cycle = &rep.gamma_history[w[0]..w[1]];
            assert!(cycle.windows(2).all(|g| g[1] <= g[0]), "{}", spec.name);
        }
        assert!(rep.orthogonality_loss.unwrap() <= 1e-8, "{}", spec.name);
    }
}

#[test]
fn sor_converges_on_spd_for_all_omegas() {
    let p = generate(&ProblemSpec::new("spd", 6, 6, 2)).unwrap();
    assert!(p.matrix.is_symmetric());
    for omega in [0.5, 1.0, 1.1, 1.5, 1.9] {
        let cfg = SolverConfig { omega, ..SolverConfig::with_tau(1e-10 * norm2(&p.rhs)) };
        let rep = sor(&p.matrix, &p.rhs, None, &cfg).unwrap();
        assert!(rep.converged(), "omega {omega}");
    }
}

#[test]
fn pgmres_and_sor_agree_on_well_conditioned_systems() {
    for name in ["WELL", "SKEW"] {
        let p = generate(&equisolve::testgen::suite_member(name).unwrap()).unwrap();
        let sys = PreparedSystem::new(&p.matrix, &p.rhs, ScalingMode::AbsRowSum, Some(IlutParams::default()))
            .unwrap();
        let cfg = SolverConfig::with_tau(1e-10);
        let g = sys.solve(SolverKind::Pgmres, &cfg).unwrap().report;
        let s = sys.solve(SolverKind::Sor, &cfg).unwrap().report;
        assert!(g.converged() && s.converged());
        assert!(rel_diff(&g.solution, &s.solution) <= 1e-6, "{name}");
    }
}

#[test]
fn diagonal_example_is_exact_in_three_steps() {
    let a = equisolve::CsrMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
    let cfg = SolverConfig { restart: 3, ..SolverConfig::with_tau(1e-12) };
    let rep = pgmres(&a, &IdentityPreconditioner, &[1.0; 3], None, &cfg).unwrap();
    assert!(rep.iterations <= 3);
    assert!(rel_diff(&rep.solution, &[1.0, 0.5, 1.0 / 3.0]) < 1e-12);
}
