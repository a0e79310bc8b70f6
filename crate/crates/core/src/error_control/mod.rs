//! Forward-error control: condition numbers, the `Ferr` bound, and the
//! nearby-system error study.
//!
//! For the preconditioned scaled operator `B = M⁻¹D⁻¹A` and an iterate `x`,
//!
//! ```text
//! ‖x − x̂‖ / ‖x̂‖  ≤  κ(B) · ‖r̂‖ / ‖M⁻¹D⁻¹b̂‖  =: Ferr,    r̂ = M⁻¹D⁻¹(b̂ − Ax)
//! ```
//!
//! The study builds `b̂ = Ax̂` from a machine-precision solution `x̂`, so the
//! left-hand side can be measured exactly and compared with `Ferr` and with
//! the normalized tolerance `ε`.

mod cond;

pub use cond::{
    cond_estimate_1norm, cond_estimate_1norm_krylov, cond_exact, cond_exact_dense, materialize,
    onenorm_estimate, CondEstimate, CondMethod, InverseApply, KrylovInverse, NormKind,
};

use rayon::prelude::*;

use crate::dense::DenseLu;
use crate::error::{check_len, Error, Result};
use crate::ilut::IlutParams;
use crate::operator::{norm2, IdentityPreconditioner, Preconditioned};
use crate::scaling::{ScalingMode, ScalingOp};
use crate::solvers::{pgmres, PreparedSystem, SolverConfig, SolverKind};
use crate::sparse::{CsrMatrix, DEFAULT_DENSE_CAP};

/// `κ · ‖r̂‖ / ‖b̃‖`.
pub fn ferr_bound(cond: &CondEstimate, r_hat_norm: f64, rhs_norm: f64) -> Result<f64> {
    if rhs_norm == 0.0 {
        return Err(Error::ZeroRhs);
    }
    Ok(cond.value * r_hat_norm / rhs_norm)
}

/// A system whose exact solution is known to working precision.
#[derive(Debug, Clone)]
pub struct NearbySystem {
    /// `b̂ = A·x̂`.
    pub rhs: Vec<f64>,
    /// Reference solution `x̂`.
    pub solution: Vec<f64>,
    /// `‖D⁻¹(b − Ax̂)‖₂ / ‖D⁻¹b‖₂` reached by the reference solve.
    pub reference_residual: f64,
}

const REFERENCE_RTOL: f64 = 1e-13;

/// Solves `D⁻¹Ax = D⁻¹b` to machine precision and returns `b̂ = Ax̂`.
///
/// Dense LU with iterative refinement up to `dense_cap`, tight PGMRES with
/// refinement above it.
pub fn nearby_system(
    a: &CsrMatrix,
    b: &[f64],
    mode: ScalingMode,
    dense_cap: usize,
) -> Result<NearbySystem> {
    check_len(a.n(), b.len())?;
    let n = a.n();
    let op = ScalingOp::equilibrate(a, mode)?;
    let (da, db) = op.apply_left(a, b)?;
    let db_norm = norm2(&db);
    if db_norm == 0.0 {
        return Ok(NearbySystem {
            rhs: vec![0.0; n],
            solution: vec![0.0; n],
            reference_residual: 0.0,
        });
    }

    let relres = |x: &[f64]| -> Vec<f64> {
        let mut ax = vec![0.0; n];
        da.spmv_into(x, &mut ax);
        db.iter().zip(&ax).map(|(b, ax)| b - ax).collect()
    };

    let mut x;
    if n <= dense_cap {
        let lu = DenseLu::factorize(&da.to_dense(dense_cap)?)?;
        x = lu.solve(&db);
        for _ in 0..3 {
            let d = lu.solve(&relres(&x));
            x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += di);
        }
    } else {
        let prepared = PreparedSystem::new(a, b, mode, Some(IlutParams::new(1e-4, 40)))?;
        let factors = prepared.factors.as_ref().expect("factors requested");
        let cfg = SolverConfig {
            restart: 50,
            max_iters: 50 * n,
            ..SolverConfig::with_tau(1e-15 * db_norm)
        };
        x = pgmres(&da, factors, &db, None, &cfg)?.solution;
        for _ in 0..3 {
            let d = pgmres(&da, factors, &relres(&x), None, &cfg)?.solution;
            x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += di);
        }
    }

    let achieved = norm2(&relres(&x)) / db_norm;
    if !(achieved <= REFERENCE_RTOL) {
        return Err(Error::Reference { achieved });
    }
    let rhs = a.spmv(&x)?;
    Ok(NearbySystem {
        rhs,
        solution: x,
        reference_residual: achieved,
    })
}

/// Parameters of [`error_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOptions {
    pub taus: Vec<f64>,
    /// One block of rows per entry; [`ScalingMode::None`] gives the
    /// unscaled rows.
    pub modes: Vec<ScalingMode>,
    /// Restart, budget and orthogonalization; `tau`/`epsilon` are ignored.
    pub config: SolverConfig,
    pub ilut: IlutParams,
    /// Largest dimension for dense condition numbers and reference solves.
    pub dense_cap: usize,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            taus: default_taus(),
            modes: vec![ScalingMode::AbsRowSum, ScalingMode::None],
            config: SolverConfig::default(),
            ilut: IlutParams::default(),
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

/// `1e-1, 1e-2, …, 1e-8`.
pub fn default_taus() -> Vec<f64> {
    (1..=8).map(|k| 10f64.powi(-k)).collect()
}

/// One `(mode, τ)` cell of an error study.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStudyRow {
    pub tau: f64,
    /// `‖x − x̂‖ / ‖x̂‖`.
    pub exact_rel_err: f64,
    pub ferr: f64,
    /// `τ / ‖b̂‖_*`.
    pub epsilon: f64,
    pub scaled: bool,
    pub scaling: ScalingMode,
    pub converged: bool,
    pub iterations: usize,
    pub cond: CondEstimate,
    /// Norm used for the error, residual and right-hand side.
    pub vector_norm: NormKind,
    /// Set when the solve for this cell failed.
    pub failure: Option<String>,
}

/// Condition number of `M⁻¹D⁻¹A` for a prepared system.
pub fn preconditioned_cond(prepared: &PreparedSystem, dense_cap: usize) -> Result<CondEstimate> {
    match &prepared.factors {
        Some(f) => {
            let b = Preconditioned::new(&prepared.matrix, f);
            if prepared.n() <= dense_cap {
                cond_exact(&b, dense_cap)
            } else {
                cond_estimate_1norm_krylov(&b)
            }
        }
        None => {
            let b = Preconditioned::new(&prepared.matrix, &IdentityPreconditioner);
            if prepared.n() <= dense_cap {
                cond_exact(&b, dense_cap)
            } else {
                cond_estimate_1norm_krylov(&b)
            }
        }
    }
}

/// Runs PGMRES over the τ list for every scaling mode.
///
/// Rows come out grouped by mode (in the order given) with τ in list order.
/// Dense condition numbers pair with 1-norm vectors so the bound is exact;
/// estimated ones pair with 2-norm vectors.
pub fn error_study(a: &CsrMatrix, b: &[f64], opts: &StudyOptions) -> Result<Vec<ErrorStudyRow>> {
    check_len(a.n(), b.len())?;
    let mut rows = Vec::with_capacity(opts.taus.len() * opts.modes.len());
    for &mode in &opts.modes {
        let nearby = nearby_system(a, b, mode, opts.dense_cap).map_err(|e| e.at("nearby system"))?;
        let prepared = PreparedSystem::new(a, &nearby.rhs, mode, Some(opts.ilut))?;
        let cond = preconditioned_cond(&prepared, opts.dense_cap).map_err(|e| e.at("condition"))?;
        let vnorm = match cond.method {
            CondMethod::DenseExact => NormKind::One,
            CondMethod::OneNormEstimator => NormKind::Two,
        };
        let btilde = prepared.precondition(&prepared.rhs);
        let btilde_norm = vnorm.of(&btilde);
        let xhat_norm = vnorm.of(&nearby.solution);
        let star_norm = prepared.scaled_rhs_norm();

        let block: Vec<ErrorStudyRow> = opts
            .taus
            .par_iter()
            .map(|&tau| {
                let cfg = SolverConfig {
                    tau,
                    epsilon: None,
                    ..opts.config.clone()
                };
                let mut row = ErrorStudyRow {
                    tau,
                    exact_rel_err: f64::NAN,
                    ferr: f64::NAN,
                    epsilon: tau / star_norm,
                    scaled: mode.is_scaled(),
                    scaling: mode,
                    converged: false,
                    iterations: 0,
                    cond,
                    vector_norm: vnorm,
                    failure: None,
                };
                let outcome = prepared.solve(SolverKind::Pgmres, &cfg).and_then(|rep| {
                    let x = &rep.report.solution;
                    let r = prepared.matrix.residual(&prepared.rhs, x)?;
                    let r_hat = prepared.precondition(&r);
                    let diff: Vec<f64> = x.iter().zip(&nearby.solution).map(|(a, b)| a - b).collect();
                    Ok((rep, vnorm.of(&diff) / xhat_norm, ferr_bound(&cond, vnorm.of(&r_hat), btilde_norm)?))
                });
                match outcome {
                    Ok((rep, err, ferr)) => {
                        row.converged = rep.report.converged();
                        row.iterations = rep.report.iterations;
                        row.exact_rel_err = err;
                        row.ferr = ferr;
                    }
                    Err(e) => {
                        log::warn!("study cell tau={tau:e} mode={mode} failed: {e}");
                        row.failure = Some(e.to_string());
                    }
                }
                row
            })
            .collect();
        rows.extend(block);
    }
    Ok(rows)
}
