//! SOR versus PGMRES benchmarks, relaxation sweeps and the Picard harness.

mod picard;

pub use picard::{picard_run, picard_solve, PicardOptions, PicardRun, PicardState, PicardTermination};

use crate::error::Result;
use crate::ilut::IlutParams;
use crate::scaling::ScalingMode;
use crate::solvers::{solve_system, SolveOptions, SolverConfig, SolverKind, Termination};
use crate::sparse::CsrMatrix;

/// One `(solver, τ)` or `(ω, τ)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub solver: SolverKind,
    pub tau: f64,
    /// Relaxation parameter for SOR cells.
    pub omega: Option<f64>,
    pub iterations: usize,
    /// Median of scaling, factorization and iteration time.
    pub wall_time_s: f64,
    /// Median ILUT factorization time (zero for SOR).
    pub factor_time_s: f64,
    pub converged: bool,
    /// Termination cause, or the error message of a failed cell.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub taus: Vec<f64>,
    pub solvers: Vec<SolverKind>,
    /// Restart, ω and budget; `tau`/`epsilon` come from the sweep.
    pub config: SolverConfig,
    pub scaling: ScalingMode,
    pub ilut: IlutParams,
    /// Timing repeats per cell (the median is reported).
    pub repeat: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            taus: crate::error_control::default_taus(),
            solvers: vec![SolverKind::Pgmres, SolverKind::Sor],
            config: SolverConfig::default(),
            scaling: ScalingMode::AbsRowSum,
            ilut: IlutParams::default(),
            repeat: 3,
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn run_cell(a: &CsrMatrix, b: &[f64], opts: &SolveOptions, repeat: usize) -> BenchRow {
    let mut row = BenchRow {
        solver: opts.solver,
        tau: opts.config.tau,
        omega: (opts.solver == SolverKind::Sor).then_some(opts.config.omega),
        iterations: 0,
        wall_time_s: 0.0,
        factor_time_s: 0.0,
        converged: false,
        status: String::new(),
    };
    let mut walls = Vec::new();
    let mut factors = Vec::new();
    for _ in 0..repeat.max(1) {
        match solve_system(a, b, opts) {
            Ok(rep) => {
                walls.push(rep.total_time());
                factors.push(rep.factor_time);
                row.iterations = rep.report.iterations;
                row.converged = rep.report.converged();
                row.status = rep.report.termination.to_string();
            }
            Err(e) => {
                log::warn!("bench cell {} tau={:e} failed: {e}", opts.solver, opts.config.tau);
                row.converged = false;
                row.status = e.to_string();
                return row;
            }
        }
    }
    row.wall_time_s = median(walls);
    row.factor_time_s = median(factors);
    row
}

/// Runs every `(solver, τ)` pair on the same system, serially.
///
/// Rows are sorted by solver, then by τ from loosest to tightest.
pub fn cmd_bench(a: &CsrMatrix, b: &[f64], opts: &BenchOptions) -> Result<Vec<BenchRow>> {
    opts.config.validate()?;
    let mut solvers = opts.solvers.clone();
    solvers.sort();
    solvers.dedup();
    let mut taus = opts.taus.clone();
    taus.sort_by(|x, y| y.total_cmp(x));
    let mut rows = Vec::new();
    for &solver in &solvers {
        for &tau in &taus {
            let solve = SolveOptions {
                solver,
                config: SolverConfig {
                    tau,
                    epsilon: None,
                    ..opts.config.clone()
                },
                scaling: opts.scaling,
                ilut: opts.ilut,
            };
            rows.push(run_cell(a, b, &solve, opts.repeat));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSweep {
    pub rows: Vec<BenchRow>,
    /// ω with the fewest sweeps among converged cells (first on ties).
    pub argmin: Option<f64>,
}

/// SOR sweep counts over a list of relaxation parameters.
pub fn cmd_omega_sweep(
    a: &CsrMatrix,
    b: &[f64],
    omegas: &[f64],
    tau: f64,
    opts: &BenchOptions,
) -> Result<OmegaSweep> {
    let mut rows = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let config = SolverConfig {
            tau,
            epsilon: None,
            omega,
            ..opts.config.clone()
        };
        config.validate()?;
        let solve = SolveOptions {
            solver: SolverKind::Sor,
            config,
            scaling: opts.scaling,
            ilut: opts.ilut,
        };
        let row = run_cell(a, b, &solve, opts.repeat);
        if row.status == Termination::Diverged.to_string() {
            log::warn!("SOR diverged at omega={omega}");
        }
        rows.push(row);
    }
    let argmin = rows
        .iter()
        .filter(|r| r.converged)
        .min_by_key(|r| r.iterations)
        .and_then(|r| r.omega);
    Ok(OmegaSweep { rows, argmin })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_bench() {
        let a = CsrMatrix::identity(4);
        let b = vec![1.0; 4];
        let opts = BenchOptions {
            repeat: 1,
            ..BenchOptions::default()
        };
        let rows = cmd_bench(&a, &b, &opts).unwrap();
        assert_eq!(rows.len(), 16);
        assert!(rows[..8].iter().all(|r| r.solver == SolverKind::Pgmres && r.iterations == 1));
        assert!(rows[..8].windows(2).all(|w| w[0].tau > w[1].tau));
    }

    #[test]
    fn identity_omega_sweep() {
        let a = CsrMatrix::identity(3);
        let sweep = cmd_omega_sweep(&a, &[1.0, 2.0, 3.0], &[1.0], 1e-10, &BenchOptions::default())
            .unwrap();
        assert_eq!(sweep.rows[0].iterations, 1);
        assert_eq!(sweep.argmin, Some(1.0));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
