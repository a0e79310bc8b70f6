mod common;

use common::*;
use equisolve::error_control::cond_exact;
use equisolve::testgen::{generate, spec_suite, suite_member, ProblemSpec};
use proptest::prelude::*;

fn row_spread(a: &equisolve::CsrMatrix) -> f64 {
    let s = a.row_abs_sums();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

fn small_spec() -> impl Strategy<Value = ProblemSpec> {
    (1usize..6, 1usize..6, 1usize..4, 0usize..8, 0.0f64..=1.0, -3.0f64..9.0, any::<u64>()).prop_map(
        |(nx, ny, nl, streams, asym, log_scale, seed)| ProblemSpec {
            stream_nodes: streams,
            stream_scale: 10f64.powf(log_scale),
            asymmetry: asym,
            seed,
            ..ProblemSpec::new("p", nx, ny, nl)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_rows_are_strictly_dominant(spec in small_spec()) {
        let p = generate(&spec).unwrap();
        prop_assert_eq!(p.matrix.n(), spec.dimension());
        for i in 0..p.matrix.n() {
            let (cols, vals) = p.matrix.row(i);
            let mut diag = 0.0;
            let mut off = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                if j == i { diag = v } else { off += v.abs() }
            }
            prop_assert!(diag > off, "row {}", i);
        }
    }

    #[test]
    fn rhs_matches_true_solution(spec in small_spec()) {
        let p = generate(&spec).unwrap();
        let r = p.matrix.residual(&p.rhs, &p.x_true).unwrap();
        prop_assert!(norm2(&r) <= 1e-13 * p.matrix.frobenius_norm() * norm2(&p.x_true));
        prop_assert!(p.x_true.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn generation_is_deterministic(spec in small_spec()) {
        let p = generate(&spec).unwrap();
        let q = generate(&spec).unwrap();
        prop_assert_eq!(p.matrix, q.matrix);
        prop_assert_eq!(
            p.rhs.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            q.rhs.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn seeds_change_the_matrix() {
    let a = generate(&ProblemSpec::new("a", 4, 4, 2)).unwrap();
    let b = generate(&ProblemSpec { seed: 8, ..ProblemSpec::new("a", 4, 4, 2) }).unwrap();
    assert_ne!(a.matrix, b.matrix);
}

#[test]
fn symmetric_layered_grid() {
    let p = generate(&ProblemSpec::new("s", 4, 4, 2)).unwrap();
    assert_eq!(p.matrix.n(), 32);
    assert!(p.matrix.is_symmetric());
    // 4x4 grid: 24 in-layer links per layer, 16 vertical links.
    assert_eq!(p.matrix.nnz(), 32 + 2 * (2 * 24 + 16));
}

#[test]
fn suite_conditioning() {
    let well = generate(&suite_member("WELL").unwrap()).unwrap();
    assert!(cond_exact(&well.matrix, 2000).unwrap().value <= 1e4);
    let ill9 = generate(&suite_member("ILL9").unwrap()).unwrap();
    assert!(row_spread(&ill9.matrix) >= 1e8);
    let skew = generate(&suite_member("SKEW").unwrap()).unwrap();
    assert!(!skew.matrix.is_symmetric());
    assert_eq!(spec_suite().len(), 4);
}

#[test]
fn stream_scaling_produces_bad_conditioning() {
    let spec = ProblemSpec {
        stream_nodes: 20,
        stream_scale: 1e6,
        ..ProblemSpec::new("streams", 10, 10, 3)
    };
    let p = generate(&spec).unwrap();
    assert_eq!(p.matrix.n(), 320);
    assert!(row_spread(&p.matrix) >= 1e5);
    assert!(cond_exact(&p.matrix, 2000).unwrap().value >= 1e6);
}

#[test]
fn rejects_degenerate_specs() {
    assert!(generate(&ProblemSpec::new("z", 0, 3, 1)).is_err());
    assert!(generate(&ProblemSpec { storage: 0.0, ..ProblemSpec::new("z", 2, 2, 1) }).is_err());
    assert!(generate(&ProblemSpec { stream_scale: -1.0, ..ProblemSpec::new("z", 2, 2, 1) }).is_err());
}
