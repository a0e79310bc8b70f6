// Dense 1-norm condition number versus the sign-vector estimator.

use equisolve::error_control::{cond_estimate_1norm_krylov, cond_exact};
use equisolve::operator::Preconditioned;
use equisolve::testgen::{generate, suite_member};
use equisolve::{ilut_factorize, IlutParams, ScalingMode, ScalingOp};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["WELL", "ILL6"] {
        let p = generate(&suite_member(name)?)?;
        let d = ScalingOp::equilibrate(&p.matrix, ScalingMode::AbsRowSum)?;
        let da = d.scale_matrix(&p.matrix)?;
        let m = ilut_factorize(&da, IlutParams::default())?;
        let b = Preconditioned::new(&da, &m);
        let exact = cond_exact(&b, 2000)?;
        let est = cond_estimate_1norm_krylov(&b)?;
        println!(
            "{name}: κ₁(A) = {:.3e}, κ₁(M⁻¹D⁻¹A) = {:.4} exact, {:.4} estimated",
            cond_exact(&p.matrix, 2000)?.value,
            exact.value,
            est.value
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
