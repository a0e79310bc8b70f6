//! Restarted, left-preconditioned GMRES(m).
//!
//! Each cycle starts from `r₀ = M⁻¹(b − Ax₀)`, builds an orthonormal Krylov
//! basis with modified Gram-Schmidt, and keeps the Hessenberg least-squares
//! problem `min ‖βe₁ − Ĥy‖₂` triangular with Givens rotations so that the
//! residual estimate `γ` is available after every step. The iteration stops
//! as soon as `γ ≤ τ`; otherwise it restarts from `x_m` after `m` steps.

use std::time::Instant;

use super::{SolveReport, SolverConfig, Termination};
use crate::dense::DenseMatrix;
use crate::error::{check_len, Error, Result};
use crate::operator::{dot, norm2, LinearOperator, Preconditioner};

const BREAKDOWN_RTOL: f64 = 1e-14;
const STAGNATION_RTOL: f64 = 1e-16;

/// Progressive Givens QR of an upper Hessenberg matrix with right-hand
/// side `βe₁`.
#[derive(Debug, Clone)]
pub struct GivensLsq {
    /// Column `j` of the triangular factor, `j + 1` entries.
    r: Vec<Vec<f64>>,
    rotations: Vec<(f64, f64)>,
    g: Vec<f64>,
}

impl GivensLsq {
    pub fn new(beta: f64) -> Self {
        Self {
            r: Vec::new(),
            rotations: Vec::new(),
            g: vec![beta],
        }
    }

    pub fn columns(&self) -> usize {
        self.r.len()
    }

    /// Appends Hessenberg column `j` (entries `h_{0..=j+1, j}`) and returns
    /// the updated residual `γ = |g_{j+1}|`.
    pub fn push_column(&mut self, h: &[f64]) -> f64 {
        let j = self.r.len();
        assert_eq!(h.len(), j + 2, "column {j} needs {} entries", j + 2);
        let mut col = h[..=j].to_vec();
        for (i, &(c, s)) in self.rotations.iter().enumerate() {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = c * a + s * b;
            col[i + 1] = -s * a + c * b;
        }
        let (a, b) = (col[j], h[j + 1]);
        let (c, s, rho) = if b == 0.0 {
            (1.0, 0.0, a)
        } else {
            let rho = a.hypot(b);
            (a / rho, b / rho, rho)
        };
        col[j] = rho;
        self.rotations.push((c, s));
        let gj = self.g[j];
        self.g[j] = c * gj;
        self.g.push(-s * gj);
        self.r.push(col);
        self.gamma()
    }

    pub fn gamma(&self) -> f64 {
        self.g.last().copied().unwrap_or(0.0).abs()
    }

    /// Back substitution for `y`; fails on an exactly singular factor.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let k = self.r.len();
        let mut y = self.g[..k].to_vec();
        for i in (0..k).rev() {
            let rii = self.r[i][i];
            if rii == 0.0 {
                return Err(Error::Singular);
            }
            y[i] /= rii;
            let yi = y[i];
            for (yl, rl) in y[..i].iter_mut().zip(&self.r[i][..i]) {
                *yl -= rl * yi;
            }
        }
        Ok(y)
    }
}

/// Solves `min_y ‖βe₁ − Ĥy‖₂` for an `(j+1) × j` upper Hessenberg `Ĥ`.
///
/// Returns `y` and the achieved minimum `γ`.
pub fn hessenberg_lsq(hess: &DenseMatrix, beta: f64) -> Result<(Vec<f64>, f64)> {
    let j = hess.ncols();
    check_len(j + 1, hess.nrows())?;
    let mut lsq = GivensLsq::new(beta);
    for c in 0..j {
        let col: Vec<f64> = (0..c + 2).map(|i| hess[(i, c)]).collect();
        lsq.push_column(&col);
    }
    let y = lsq.solve()?;
    Ok((y, lsq.gamma()))
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonality_loss(basis: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, vi) in basis.iter().enumerate() {
        for (j, vj) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(vi, vj) - target).abs());
        }
    }
    worst
}

/// Restarted GMRES on `M⁻¹A x = M⁻¹b`.
///
/// Stopping is tested on the Givens estimate `γ` of `‖M⁻¹(b − Ax)‖₂` after
/// every inner iteration. Non-convergence is reported in the
/// [`Termination`] of the returned report together with the last iterate.
pub fn pgmres<A, M>(
    a: &A,
    m: &M,
    b: &[f64],
    x0: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<SolveReport>
where
    A: LinearOperator + ?Sized,
    M: Preconditioner + ?Sized,
{
    cfg.validate()?;
    let n = a.dim();
    check_len(n, b.len())?;
    let mut x = match x0 {
        Some(x0) => {
            check_len(n, x0.len())?;
            x0.to_vec()
        }
        None => vec![0.0; n],
    };
    let start = Instant::now();
    let restart = cfg.restart.min(n.max(1));
    let tau = cfg.tau;

    let mut av = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(restart + 1);
    let mut history = Vec::new();
    let mut cycle_starts = Vec::new();
    let mut iterations = 0usize;
    let mut cycles = 0usize;
    let mut initial_residual = f64::NAN;
    let mut gamma;
    let mut stalled = 0usize;
    let mut worst_orth: Option<f64> = cfg.track_orthogonality.then_some(0.0);

    let termination = loop {
        // r₀ = M⁻¹(b − A x₀)
        a.apply(&x, &mut av);
        for ((ri, bi), ai) in r.iter_mut().zip(b).zip(&av) {
            *ri = bi - ai;
        }
        m.apply_inverse(&r, &mut w);
        let beta = norm2(&w);
        if cycles == 0 {
            initial_residual = beta;
        }
        gamma = beta;
        if beta <= tau {
            break Termination::Converged;
        }
        if iterations >= cfg.max_iters {
            break Termination::MaxIters;
        }
        if !beta.is_finite() {
            break Termination::Breakdown;
        }

        cycles += 1;
        cycle_starts.push(history.len());
        basis.clear();
        basis.push(w.iter().map(|v| v / beta).collect());
        let mut lsq = GivensLsq::new(beta);

        for j in 0..restart {
            // M w = A v_j
            a.apply(&basis[j], &mut av);
            m.apply_inverse(&av, &mut w);
            let wnorm0 = norm2(&w);
            let mut h = vec![0.0; j + 2];
            for (i, vi) in basis.iter().enumerate() {
                h[i] = dot(vi, &w);
                axpy(-h[i], vi, &mut w);
            }
            if cfg.reorthogonalize {
                for (i, vi) in basis.iter().enumerate() {
                    let c = dot(vi, &w);
                    h[i] += c;
                    axpy(-c, vi, &mut w);
                }
            }
            let hnext = norm2(&w);
            h[j + 1] = hnext;
            gamma = lsq.push_column(&h);
            iterations += 1;
            history.push(gamma);

            let happy = hnext <= BREAKDOWN_RTOL * wnorm0;
            if happy || gamma <= tau || iterations >= cfg.max_iters {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }

        if let Some(worst) = worst_orth.as_mut() {
            *worst = worst.max(orthogonality_loss(&basis));
        }

        // x_m = x₀ + V_m y_m
        let y = match lsq.solve() {
            Ok(y) => y,
            Err(_) => break Termination::Breakdown,
        };
        for (yi, vi) in y.iter().zip(&basis) {
            axpy(*yi, vi, &mut x);
        }

        if gamma <= tau {
            break Termination::Converged;
        }
        if iterations >= cfg.max_iters {
            break Termination::MaxIters;
        }
        if beta - gamma < STAGNATION_RTOL * beta {
            stalled += 1;
            if stalled >= 2 {
                break Termination::Breakdown;
            }
        } else {
            stalled = 0;
        }
    };

    Ok(SolveReport {
        solution: x,
        iterations,
        restarts: cycles.saturating_sub(1),
        gamma_history: history,
        cycle_starts,
        initial_residual,
        final_residual: gamma,
        wall_time: start.elapsed().as_secs_f64(),
        termination,
        orthogonality_loss: worst_orth,
    })
}
