// ILUT fill and its effect on GMRES iteration counts.

use equisolve::solvers::PreparedSystem;
use equisolve::testgen::{generate, suite_member};
use equisolve::{IlutParams, ScalingMode, SolverConfig, SolverKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = generate(&suite_member("SKEW")?)?;
    println!("nnz(A) = {}", p.matrix.nnz());
    println!("{:>8} {:>5} {:>8} {:>6}", "droptol", "lfil", "nnz(LU)", "iters");
    for (droptol, lfil) in [(0.1, 2), (0.01, 10), (1e-3, 20), (0.0, 40)] {
        let sys = PreparedSystem::new(
            &p.matrix,
            &p.rhs,
            ScalingMode::AbsRowSum,
            Some(IlutParams::new(droptol, lfil)),
        )?;
        let nnz = sys.factors.as_ref().map(|f| f.nnz()).unwrap_or(0);
        let rep = sys.solve(SolverKind::Pgmres, &SolverConfig::with_epsilon(1e-10))?;
        println!("{droptol:>8} {lfil:>5} {nnz:>8} {:>6}", rep.report.iterations);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
