// Iteration counts of SOR and PGMRES as the tolerance tightens.

use equisolve::bench::{cmd_bench, BenchOptions};
use equisolve::testgen::{generate, suite_member};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = generate(&suite_member("ILL6")?)?;
    let opts = BenchOptions {
        repeat: 1,
        ..BenchOptions::default()
    };
    let rows = cmd_bench(&p.matrix, &p.rhs, &opts)?;
    println!("{:>6} {:>8} {:>6} {:>10}", "solver", "tau", "iters", "time [s]");
    for r in &rows {
        println!("{:>6} {:>8.0e} {:>6} {:>10.2e}", r.solver.to_string(), r.tau, r.iterations, r.wall_time_s);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
