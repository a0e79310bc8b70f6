//! Forward successive over-relaxation.

use std::time::Instant;

use super::{SolveReport, SolverConfig, Termination};
use crate::error::{check_len, Error, Result};
use crate::operator::norm2;
use crate::sparse::CsrMatrix;

const DIVERGENCE_GROWTH: f64 = 1e6;

/// Forward SOR sweeps until `‖b − Ax‖₂ ≤ τ`.
///
/// One sweep is one iteration; the residual is recomputed with a full
/// product after every sweep.
pub fn sor(a: &CsrMatrix, b: &[f64], x0: Option<&[f64]>, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let n = a.n();
    check_len(n, b.len())?;
    let mut x = match x0 {
        Some(x0) => {
            check_len(n, x0.len())?;
            x0.to_vec()
        }
        None => vec![0.0; n],
    };
    let diag = a.diagonal();
    if let Some(row) = diag.iter().position(|&d| d == 0.0) {
        return Err(Error::ZeroDiagonal { row });
    }
    let omega = cfg.omega;
    let start = Instant::now();
    let mut r = vec![0.0; n];
    let residual = |x: &[f64], r: &mut [f64]| {
        a.spmv_into(x, r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        norm2(r)
    };

    let initial = residual(&x, &mut r);
    let mut current = initial;
    let mut best = initial;
    let mut history = Vec::new();
    let mut iterations = 0;
    let termination = if initial <= cfg.tau {
        Termination::Converged
    } else {
        loop {
            if iterations >= cfg.max_iters {
                break Termination::MaxIters;
            }
            for i in 0..n {
                let (cols, vals) = a.row(i);
                let mut s = b[i];
                for (&j, &v) in cols.iter().zip(vals) {
                    if j != i {
                        s -= v * x[j];
                    }
                }
                x[i] = (1.0 - omega) * x[i] + omega * s / diag[i];
            }
            iterations += 1;
            current = residual(&x, &mut r);
            history.push(current);
            if current <= cfg.tau {
                break Termination::Converged;
            }
            if !current.is_finite() || current > DIVERGENCE_GROWTH * best {
                break Termination::Diverged;
            }
            best = best.min(current);
        }
    };

    Ok(SolveReport {
        solution: x,
        iterations,
        restarts: 0,
        gamma_history: history,
        cycle_starts: vec![0],
        initial_residual: initial,
        final_residual: current,
        wall_time: start.elapsed().as_secs_f64(),
        termination,
        orthogonality_loss: None,
    })
}
