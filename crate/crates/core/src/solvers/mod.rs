//! Iterative solvers and the scaled, preconditioned solve pipeline.

mod gmres;
mod pipeline;
mod sor;

pub use gmres::{hessenberg_lsq, pgmres, GivensLsq};
pub use pipeline::{solve_system, PreparedSystem, SolveOptions, SystemReport};
pub use sor::sor;

use crate::error::{Error, Result};

/// Which iterative method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum SolverKind {
    Pgmres,
    Sor,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Pgmres => "PGMRES",
            SolverKind::Sor => "SOR",
        })
    }
}

/// Stopping and method parameters shared by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Absolute residual tolerance.
    pub tau: f64,
    /// Normalized tolerance; when set the pipeline uses `τ = ε‖b‖_*` and
    /// PGMRES must also meet `‖D⁻¹(b − Ax)‖₂ ≤ τ`.
    pub epsilon: Option<f64>,
    /// GMRES restart length.
    pub restart: usize,
    /// Budget of inner iterations (GMRES) or sweeps (SOR).
    pub max_iters: usize,
    /// SOR relaxation parameter.
    pub omega: f64,
    /// One extra Gram-Schmidt pass per Arnoldi step.
    pub reorthogonalize: bool,
    /// Measure `max |VᵀV − I|` at the end of every GMRES cycle.
    pub track_orthogonality: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau: 1e-8,
            epsilon: None,
            restart: 20,
            max_iters: 20_000,
            omega: 1.1,
            reorthogonalize: false,
            track_orthogonality: false,
        }
    }
}

impl SolverConfig {
    pub fn with_tau(tau: f64) -> Self {
        Self {
            tau,
            ..Self::default()
        }
    }

    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon: Some(epsilon),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("epsilon must be positive, got {e}"));
            }
        }
        if self.restart == 0 {
            return bad("restart must be at least 1".into());
        }
        if !(self.omega > 0.0 && self.omega < 2.0) {
            return bad(format!("omega must lie in (0, 2), got {}", self.omega));
        }
        Ok(())
    }
}

/// Why an iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
    /// GMRES made no progress over two consecutive restart cycles, or the
    /// Hessenberg least-squares factor was exactly singular.
    Breakdown,
    /// SOR residual grew by more than 1e6 over its minimum.
    Diverged,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max-iters",
            Termination::Breakdown => "breakdown",
            Termination::Diverged => "diverged",
        };
        f.write_str(s)
    }
}

/// Convergence history of one solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    /// GMRES inner iterations or SOR sweeps.
    pub iterations: usize,
    /// Number of GMRES restarts (cycles minus one); zero for SOR.
    pub restarts: usize,
    /// Residual estimate after every iteration: Givens `γ` for GMRES,
    /// `‖b − Ax‖₂` for SOR.
    pub gamma_history: Vec<f64>,
    /// Index into `gamma_history` where each GMRES cycle starts.
    pub cycle_starts: Vec<usize>,
    /// Residual norm of the starting guess (`β` of the first cycle).
    pub initial_residual: f64,
    /// Last residual estimate (`γ` for GMRES).
    pub final_residual: f64,
    pub wall_time: f64,
    pub termination: Termination,
    /// Largest `max |VᵀV − I|` seen, when tracking was requested.
    pub orthogonality_loss: Option<f64>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}
