// Exact forward error, the Ferr bound and ε with and without row scaling.

use equisolve::error_control::{error_study, StudyOptions};
use equisolve::testgen::{generate, suite_member};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = generate(&suite_member("ILL6")?)?;
    let rows = error_study(&p.matrix, &p.rhs, &StudyOptions::default())?;
    println!(
        "{:>7} {:>6} {:>11} {:>11} {:>11} {:>9}",
        "scaled", "tau", "exact err", "Ferr", "eps", "Ferr/eps"
    );
    for r in &rows {
        println!(
            "{:>7} {:>6.0e} {:>11.3e} {:>11.3e} {:>11.3e} {:>9.1e}",
            r.scaled,
            r.tau,
            r.exact_rel_err,
            r.ferr,
            r.epsilon,
            r.ferr / r.epsilon
        );
    }
    println!("condition numbers from {}", rows[0].cond.method);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
