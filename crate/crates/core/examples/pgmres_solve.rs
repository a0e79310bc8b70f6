// One scaled, preconditioned GMRES solve with a normalized tolerance.

use equisolve::operator::norm2;
use equisolve::testgen::{generate, suite_member};
use equisolve::{solve_system, ScalingOp, SolveOptions, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = generate(&suite_member("ILL6")?)?;
    let opts = SolveOptions {
        config: SolverConfig::with_epsilon(1e-6),
        ..SolveOptions::default()
    };
    let rep = solve_system(&p.matrix, &p.rhs, &opts)?;
    println!(
        "{} with {}: τ = {:.3e} (ε = {:e}), {} iterations, {}",
        rep.solver, rep.scaling, rep.tau, rep.epsilon, rep.report.iterations, rep.report.termination
    );
    for (k, g) in rep.report.gamma_history.iter().enumerate() {
        println!("  γ[{k:>2}] = {g:.3e}");
    }

    let d = ScalingOp::equilibrate(&p.matrix, opts.scaling)?;
    let r = p.matrix.residual(&p.rhs, &rep.report.solution)?;
    let err: Vec<f64> = rep.report.solution.iter().zip(&p.x_true).map(|(a, b)| a - b).collect();
    println!("‖D⁻¹r‖/‖D⁻¹b‖ = {:.3e}", d.scaled_norm(&r)? / d.scaled_norm(&p.rhs)?);
    println!("‖x − x_true‖/‖x_true‖ = {:.3e}", norm2(&err) / norm2(&p.x_true));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
