//! Equilibrate, factor and solve: `M⁻¹D⁻¹Ax = M⁻¹D⁻¹b`.

use std::time::Instant;

use super::{pgmres, sor, SolveReport, SolverConfig, SolverKind, Termination};
use crate::error::{check_len, Result};
use crate::ilut::{ilut_factorize, IlutFactors, IlutParams};
use crate::operator::{norm2, IdentityPreconditioner, Preconditioner};
use crate::scaling::{ScalingMode, ScalingOp};
use crate::sparse::CsrMatrix;

/// Everything `solve_system` needs besides the system itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub solver: SolverKind,
    pub config: SolverConfig,
    pub scaling: ScalingMode,
    pub ilut: IlutParams,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            solver: SolverKind::Pgmres,
            config: SolverConfig::default(),
            scaling: ScalingMode::AbsRowSum,
            ilut: IlutParams::default(),
        }
    }
}

/// A system after scaling and (for GMRES) factorization.
#[derive(Debug, Clone)]
pub struct PreparedSystem {
    pub scaling: ScalingOp,
    /// `D⁻¹A`.
    pub matrix: CsrMatrix,
    /// `D⁻¹b`.
    pub rhs: Vec<f64>,
    /// ILUT factors of `D⁻¹A`; absent for SOR-only preparation.
    pub factors: Option<IlutFactors>,
    pub scaling_time: f64,
    pub factor_time: f64,
}

impl PreparedSystem {
    pub fn new(
        a: &CsrMatrix,
        b: &[f64],
        scaling: ScalingMode,
        ilut: Option<IlutParams>,
    ) -> Result<Self> {
        check_len(a.n(), b.len())?;
        let t0 = Instant::now();
        let op = ScalingOp::equilibrate(a, scaling).map_err(|e| e.at("scaling"))?;
        let (matrix, rhs) = op.apply_left(a, b)?;
        let scaling_time = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let factors = ilut
            .map(|p| ilut_factorize(&matrix, p).map_err(|e| e.at("ilut factorization")))
            .transpose()?;
        Ok(Self {
            scaling: op,
            matrix,
            rhs,
            factors,
            scaling_time,
            factor_time: t1.elapsed().as_secs_f64(),
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// `‖b‖_* = ‖D⁻¹b‖₂`.
    pub fn scaled_rhs_norm(&self) -> f64 {
        norm2(&self.rhs)
    }

    /// `M⁻¹D⁻¹v` for a vector already scaled by `D⁻¹`.
    pub fn precondition(&self, scaled: &[f64]) -> Vec<f64> {
        let mut out = scaled.to_vec();
        if let Some(f) = &self.factors {
            f.apply_inverse(scaled, &mut out);
        }
        out
    }

    /// Resolves the absolute tolerance: `τ = ε‖b‖_*` when `ε` is given.
    pub fn tolerance(&self, cfg: &SolverConfig) -> f64 {
        match cfg.epsilon {
            Some(eps) => eps * self.scaled_rhs_norm(),
            None => cfg.tau,
        }
    }

    fn pgmres(&self, cfg: &SolverConfig, x0: Option<&[f64]>) -> Result<SolveReport> {
        match &self.factors {
            Some(f) => pgmres(&self.matrix, f, &self.rhs, x0, cfg),
            None => pgmres(&self.matrix, &IdentityPreconditioner, &self.rhs, x0, cfg),
        }
    }

    /// PGMRES that also holds `‖D⁻¹(b − Ax)‖₂ ≤ τ`.
    ///
    /// `γ` bounds the preconditioned residual only. While the scaled residual
    /// is still above `τ`, restart from the current iterate with the inner
    /// target shrunk by the observed excess.
    fn pgmres_true_residual(&self, cfg: &SolverConfig) -> Result<SolveReport> {
        const MAX_PASSES: usize = 8;
        let tau = cfg.tau;
        let mut rep = self.pgmres(cfg, None)?;
        let mut inner = cfg.clone();
        for _ in 0..MAX_PASSES {
            if !rep.converged() {
                return Ok(rep);
            }
            let rho = norm2(&self.matrix.residual(&self.rhs, &rep.solution)?);
            if rho <= tau {
                return Ok(rep);
            }
            let used = rep.iterations;
            if used >= cfg.max_iters {
                break;
            }
            inner.tau = (inner.tau * 0.5 * tau / rho).max(f64::MIN_POSITIVE);
            inner.max_iters = cfg.max_iters - used;
            let more = self.pgmres(&inner, Some(&rep.solution))?;
            rep = merge(rep, more);
        }
        let rho = norm2(&self.matrix.residual(&self.rhs, &rep.solution)?);
        if rep.converged() && rho > tau {
            rep.termination = Termination::MaxIters;
        }
        Ok(rep)
    }

    /// Runs one solver on the prepared system.
    pub fn solve(&self, solver: SolverKind, cfg: &SolverConfig) -> Result<SystemReport> {
        let tau = self.tolerance(cfg);
        let rhs_norm = self.scaled_rhs_norm();
        let mut run_cfg = cfg.clone();
        run_cfg.tau = tau;
        run_cfg.epsilon = None;
        let report = match solver {
            SolverKind::Pgmres if cfg.epsilon.is_some() => self.pgmres_true_residual(&run_cfg),
            SolverKind::Pgmres => self.pgmres(&run_cfg, None),
            SolverKind::Sor => sor(&self.matrix, &self.rhs, None, &run_cfg),
        }
        .map_err(|e| e.at("solve"))?;
        Ok(SystemReport {
            solver,
            tau,
            epsilon: if rhs_norm > 0.0 { tau / rhs_norm } else { f64::INFINITY },
            scaled_rhs_norm: rhs_norm,
            scaling: self.scaling.mode(),
            scaling_time: self.scaling_time,
            factor_time: self.factor_time,
            report,
        })
    }
}

/// Appends a warm-started continuation to an earlier report.
fn merge(mut first: SolveReport, more: SolveReport) -> SolveReport {
    let offset = first.gamma_history.len();
    first.cycle_starts.extend(more.cycle_starts.iter().map(|c| c + offset));
    first.gamma_history.extend(more.gamma_history);
    first.iterations += more.iterations;
    first.restarts += more.restarts + 1;
    first.final_residual = more.final_residual;
    first.wall_time += more.wall_time;
    first.termination = more.termination;
    first.solution = more.solution;
    first.orthogonality_loss = match (first.orthogonality_loss, more.orthogonality_loss) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    first
}

/// Outcome of [`solve_system`].
#[derive(Debug, Clone)]
pub struct SystemReport {
    pub solver: SolverKind,
    /// Absolute tolerance the solver ran with.
    pub tau: f64,
    /// `τ / ‖b‖_*`.
    pub epsilon: f64,
    pub scaled_rhs_norm: f64,
    pub scaling: ScalingMode,
    pub scaling_time: f64,
    pub factor_time: f64,
    pub report: SolveReport,
}

impl SystemReport {
    /// Scaling, factorization and iteration time together.
    pub fn total_time(&self) -> f64 {
        self.scaling_time + self.factor_time + self.report.wall_time
    }
}

/// Equilibrates `A`, factors `D⁻¹A` with ILUT and runs the requested solver.
///
/// Failures carry the name of the stage that raised them.
pub fn solve_system(a: &CsrMatrix, b: &[f64], opts: &SolveOptions) -> Result<SystemReport> {
    opts.config.validate()?;
    let ilut = (opts.solver == SolverKind::Pgmres).then_some(opts.ilut);
    let prepared = PreparedSystem::new(a, b, opts.scaling, ilut)?;
    prepared.solve(opts.solver, &opts.config)
}
