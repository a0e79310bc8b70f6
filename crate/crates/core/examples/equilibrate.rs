// Row equilibration of a badly scaled system.

use equisolve::testgen::{generate, suite_member};
use equisolve::{ScalingMode, ScalingOp};

fn spread(sums: &[f64]) -> f64 {
    let max = sums.iter().cloned().fold(0.0, f64::max);
    let min = sums.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = generate(&suite_member("ILL9")?)?;
    println!("unscaled row 1-norm spread: {:.3e}", spread(&p.matrix.row_abs_sums()));
    let b2 = p.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    println!("‖b‖₂ = {b2:.4e}");
    for mode in [ScalingMode::AbsRowSum, ScalingMode::AbsOfRowSum] {
        let d = ScalingOp::equilibrate(&p.matrix, mode)?;
        let scaled = d.scale_matrix(&p.matrix)?;
        println!(
            "{mode:>14}: row spread {:.3e}, ‖b‖_* = {:.4e}",
            spread(&scaled.row_abs_sums()),
            d.scaled_norm(&p.rhs)?,
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
