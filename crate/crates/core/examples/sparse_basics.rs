// Build a CSR matrix, multiply, round-trip it through Matrix Market and
// print its profile.

use equisolve::mm;
use equisolve::profile::profile;
use equisolve::CsrMatrix;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = CsrMatrix::from_triplets(
        3,
        &[(0, 0, 4.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 4.0), (1, 2, -2.0), (2, 1, -1.0), (2, 2, 4.0)],
    )?;
    let y = a.spmv(&[1.0, 2.0, 3.0])?;
    println!("A·[1,2,3] = {y:?}");

    let dir = std::env::temp_dir().join(format!("equisolve-basics-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("a.mtx");
    mm::write_matrix_file(&path, &a)?;
    let back = mm::read_matrix(&path)?;
    assert_eq!(back, a);
    std::fs::remove_dir_all(&dir)?;

    let p = profile(&a, true);
    println!(
        "n={} nnz={} sparsity={:.1}% normality={:.3e} cond1={:.3}",
        p.dimension,
        p.nnz,
        p.sparsity_pct,
        p.normality,
        p.cond_estimate.map(|c| c.value).unwrap_or(f64::NAN)
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
