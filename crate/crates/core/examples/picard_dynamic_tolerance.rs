// Picard iteration where each linear solve stops at τ_k = ε‖b_k‖_*.
//
// The nonlinearity `ν·sinh(H)` is synthetic; it only serves to produce a
// shrinking sequence of right-hand sides.

use equisolve::bench::{picard_run, PicardOptions};
use equisolve::testgen::suite_member;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = suite_member("WELL")?;
    for epsilon in [1e-1, 1e-5] {
        let run = picard_run(&spec, &PicardOptions {
            epsilon,
            ..PicardOptions::default()
        })?;
        println!("ε = {epsilon:e}: {} after {} steps", run.termination, run.outer_iterations());
        for s in &run.history {
            println!(
                "  k={} ‖F‖={:.3e} τ_k={:.3e} linear iters={}",
                s.iteration, s.nonlinear_residual, s.tau, s.linear_iterations
            );
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
