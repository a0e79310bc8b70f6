// Generate the test suite, profile each member and write it to disk.

use equisolve::mm;
use equisolve::profile::profile;
use equisolve::testgen::{generate, spec_suite};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("equisolve-suite-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    for spec in spec_suite() {
        let p = generate(&spec)?;
        let prof = profile(&p.matrix, true);
        let sums = p.matrix.row_abs_sums();
        let spread = sums.iter().cloned().fold(0.0, f64::max) / sums.iter().cloned().fold(f64::INFINITY, f64::min);
        println!(
            "{:<5} n={} nnz={} normality={:.2e} κ₁={:.2e} row spread={:.1e}",
            spec.name,
            prof.dimension,
            prof.nnz,
            prof.normality,
            prof.cond_estimate.map(|c| c.value).unwrap_or(f64::NAN),
            spread
        );
        mm::write_matrix_file(dir.join(format!("{}.mtx", spec.name)), &p.matrix)?;
        mm::write_vector_file(dir.join(format!("{}_rhs.mtx", spec.name)), &p.rhs)?;
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
