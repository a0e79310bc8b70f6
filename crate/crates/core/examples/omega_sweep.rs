// SOR sweep counts over ω on two problems.

use equisolve::bench::{cmd_omega_sweep, BenchOptions};
use equisolve::testgen::{generate, suite_member};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let omegas: Vec<f64> = (10..20).map(|i| i as f64 / 10.0).collect();
    let opts = BenchOptions {
        repeat: 1,
        ..BenchOptions::default()
    };
    for name in ["WELL", "ILL6"] {
        let p = generate(&suite_member(name)?)?;
        let sweep = cmd_omega_sweep(&p.matrix, &p.rhs, &omegas, 1e-8, &opts)?;
        let counts: Vec<String> = sweep.rows.iter().map(|r| r.iterations.to_string()).collect();
        println!("{name}: [{}] best ω = {:?}", counts.join(" "), sweep.argmin);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
