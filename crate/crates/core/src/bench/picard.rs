//! Picard iteration on `F(H) = A·H + ν·sinh(H) − c = 0`.
//!
//! The `sinh` term is a made-up smooth diagonal nonlinearity. Its only job is
//! to produce a sequence of linear systems whose right-hand sides shrink, so
//! that the tolerance `τ_k = ε‖b_k‖_*` shrinks with them.
//!
//! Each step freezes the coefficient at the current head,
//! `A_k = A + ν·diag(sinh(h)/h)`, and solves `A_k x = −F(H^k)` for the update.

use crate::error::Result;
use crate::operator::norm2;
use crate::solvers::{solve_system, SolveOptions, SolverConfig};
use crate::sparse::CsrMatrix;
use crate::testgen::{generate, ProblemSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct PicardOptions {
    /// Nonlinearity strength `ν`.
    pub nu: f64,
    /// Normalized linear tolerance, fixed over all outer steps.
    pub epsilon: f64,
    pub max_outer: usize,
    /// Stop when `‖F(H^k)‖ ≤ rtol·‖F(H⁰)‖`.
    pub rtol: f64,
    /// Solver, scaling and ILUT settings for the inner solves.
    pub solve: SolveOptions,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            nu: 0.01,
            epsilon: 1e-5,
            max_outer: 50,
            rtol: 1e-6,
            solve: SolveOptions::default(),
        }
    }
}

/// One outer step: the head at its start and the linear solve taken from it.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardState {
    pub iteration: usize,
    /// `H^k`.
    pub head: Vec<f64>,
    /// `‖F(H^k)‖₂`.
    pub nonlinear_residual: f64,
    pub epsilon: f64,
    /// `τ_k = ε‖b_k‖_*`; zero on the final converged state.
    pub tau: f64,
    pub linear_iterations: usize,
    pub linear_converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PicardTermination {
    Converged,
    MaxOuter,
    Diverged,
}

impl std::fmt::Display for PicardTermination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PicardTermination::Converged => "converged",
            PicardTermination::MaxOuter => "max-outer",
            PicardTermination::Diverged => "diverged",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PicardRun {
    /// Every visited head; the last one has no linear solve when converged.
    pub history: Vec<PicardState>,
    pub termination: PicardTermination,
}

impl PicardRun {
    /// Number of linear solves performed.
    pub fn outer_iterations(&self) -> usize {
        self.history.iter().filter(|s| s.tau > 0.0).count()
    }

    /// `τ_k` of every step that ran a linear solve.
    pub fn taus(&self) -> Vec<f64> {
        self.history.iter().filter(|s| s.tau > 0.0).map(|s| s.tau).collect()
    }
}

fn sinhc(h: f64) -> f64 {
    if h.abs() < 1e-8 {
        1.0 + h * h / 6.0
    } else {
        h.sinh() / h
    }
}

const DIVERGENCE_GROWTH: f64 = 1e3;

/// Picard from `H⁰ = 0` for the problem whose exact solution is `h_star`.
pub fn picard_solve(a: &CsrMatrix, h_star: &[f64], opts: &PicardOptions) -> Result<PicardRun> {
    let nu = opts.nu;
    let n = a.n();
    let mut c = a.spmv(h_star)?;
    for (ci, h) in c.iter_mut().zip(h_star) {
        *ci += nu * h.sinh();
    }
    let residual = |h: &[f64]| -> Result<Vec<f64>> {
        let mut f = a.spmv(h)?;
        for ((fi, hi), ci) in f.iter_mut().zip(h).zip(&c) {
            *fi += nu * hi.sinh() - ci;
        }
        Ok(f)
    };

    let mut head = vec![0.0; n];
    let mut f = residual(&head)?;
    let f0 = norm2(&f);
    let mut history = Vec::new();
    let solve_opts = SolveOptions {
        config: SolverConfig {
            epsilon: Some(opts.epsilon),
            ..opts.solve.config.clone()
        },
        ..opts.solve.clone()
    };

    let mut k = 0;
    loop {
        let fnorm = norm2(&f);
        let mut state = PicardState {
            iteration: k,
            head: head.clone(),
            nonlinear_residual: fnorm,
            epsilon: opts.epsilon,
            tau: 0.0,
            linear_iterations: 0,
            linear_converged: false,
        };
        if fnorm <= opts.rtol * f0 {
            history.push(state);
            return Ok(PicardRun {
                history,
                termination: PicardTermination::Converged,
            });
        }
        if !fnorm.is_finite() || fnorm > DIVERGENCE_GROWTH * f0 {
            history.push(state);
            return Ok(PicardRun {
                history,
                termination: PicardTermination::Diverged,
            });
        }
        if k >= opts.max_outer {
            history.push(state);
            return Ok(PicardRun {
                history,
                termination: PicardTermination::MaxOuter,
            });
        }
        let lagged: Vec<f64> = head.iter().map(|&h| nu * sinhc(h)).collect();
        let ak = a.add_diagonal(&lagged)?;
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let rep = solve_system(&ak, &rhs, &solve_opts).map_err(|e| e.at("picard step"))?;
        state.tau = rep.tau;
        state.linear_iterations = rep.report.iterations;
        state.linear_converged = rep.report.converged();
        history.push(state);
        for (h, x) in head.iter_mut().zip(&rep.report.solution) {
            *h += x;
        }
        f = residual(&head)?;
        k += 1;
    }
}

/// [`picard_solve`] on a generated problem, targeting its `x_true`.
pub fn picard_run(spec: &ProblemSpec, opts: &PicardOptions) -> Result<PicardRun> {
    let p = generate(spec)?;
    picard_solve(&p.matrix, &p.x_true, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_problem_takes_one_step() {
        let spec = ProblemSpec::new("small", 6, 6, 2);
        let opts = PicardOptions {
            nu: 0.0,
            epsilon: 1e-10,
            ..PicardOptions::default()
        };
        let run = picard_run(&spec, &opts).unwrap();
        assert_eq!(run.termination, PicardTermination::Converged);
        assert_eq!(run.outer_iterations(), 1);
    }

    #[test]
    fn sinhc_is_smooth_at_zero() {
        assert_eq!(sinhc(0.0), 1.0);
        assert!((sinhc(1e-4) - 1e-4f64.sinh() / 1e-4).abs() < 1e-15);
    }
}
