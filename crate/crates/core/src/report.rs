//! Versioned CSV output.
//!
//! Every table starts with the line `# equisolve-csv v1`, followed by a fixed
//! header. Reals are written in shortest round-trip scientific notation.

use std::io::Write;

use crate::bench::{BenchRow, OmegaSweep, PicardRun};
use crate::error::{Error, Result};
use crate::error_control::ErrorStudyRow;
use crate::profile::MatrixProfile;
use crate::solvers::SystemReport;

pub const CSV_MAGIC: &str = "# equisolve-csv v1";

pub const STUDY_HEADER: [&str; 5] = ["tau", "exact_rel_err", "ferr", "epsilon", "scaled"];

fn r(v: f64) -> String {
    format!("{v:e}")
}

fn table<'a>(out: &'a mut dyn Write, header: &[&str]) -> Result<csv::Writer<&'a mut dyn Write>> {
    writeln!(out, "{CSV_MAGIC}").map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

fn finish(mut w: csv::Writer<&mut dyn Write>) -> Result<()> {
    w.flush().map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })
}

pub fn write_study(out: &mut dyn Write, rows: &[ErrorStudyRow]) -> Result<()> {
    let mut w = table(out, &STUDY_HEADER)?;
    for row in rows {
        w.write_record([
            r(row.tau),
            r(row.exact_rel_err),
            r(row.ferr),
            r(row.epsilon),
            row.scaled.to_string(),
        ])?;
    }
    finish(w)
}

pub fn write_bench(out: &mut dyn Write, rows: &[BenchRow]) -> Result<()> {
    let mut w = table(
        out,
        &["solver", "tau", "iterations", "wall_time_s", "factor_time_s", "converged", "status"],
    )?;
    for row in rows {
        w.write_record([
            row.solver.to_string(),
            r(row.tau),
            row.iterations.to_string(),
            r(row.wall_time_s),
            r(row.factor_time_s),
            row.converged.to_string(),
            row.status.clone(),
        ])?;
    }
    finish(w)
}

pub fn write_omega_sweep(out: &mut dyn Write, sweep: &OmegaSweep) -> Result<()> {
    let mut w = table(
        out,
        &["omega", "tau", "iterations", "wall_time_s", "converged", "status", "argmin"],
    )?;
    for row in &sweep.rows {
        w.write_record([
            row.omega.map(r).unwrap_or_default(),
            r(row.tau),
            row.iterations.to_string(),
            r(row.wall_time_s),
            row.converged.to_string(),
            row.status.clone(),
            (row.omega.is_some() && row.omega == sweep.argmin).to_string(),
        ])?;
    }
    finish(w)
}

/// A solve summary; `scaled_rel_residual` is `‖D⁻¹(b − Ax)‖₂ / ‖D⁻¹b‖₂`.
pub fn write_solve(out: &mut dyn Write, rep: &SystemReport, scaled_rel_residual: f64) -> Result<()> {
    let mut w = table(
        out,
        &[
            "solver",
            "scaling",
            "tau",
            "epsilon",
            "iterations",
            "restarts",
            "initial_residual",
            "final_residual",
            "scaled_rel_residual",
            "converged",
            "termination",
            "scaling_time_s",
            "factor_time_s",
            "solve_time_s",
        ],
    )?;
    let s = &rep.report;
    w.write_record([
        rep.solver.to_string(),
        rep.scaling.to_string(),
        r(rep.tau),
        r(rep.epsilon),
        s.iterations.to_string(),
        s.restarts.to_string(),
        r(s.initial_residual),
        r(s.final_residual),
        r(scaled_rel_residual),
        s.converged().to_string(),
        s.termination.to_string(),
        r(rep.scaling_time),
        r(rep.factor_time),
        r(s.wall_time),
    ])?;
    finish(w)
}

pub fn write_profile(out: &mut dyn Write, name: &str, p: &MatrixProfile) -> Result<()> {
    let mut w = table(
        out,
        &["name", "dimension", "nnz", "sparsity_pct", "normality", "cond", "cond_method"],
    )?;
    w.write_record([
        name.to_string(),
        p.dimension.to_string(),
        p.nnz.to_string(),
        r(p.sparsity_pct),
        r(p.normality),
        p.cond_estimate.map(|c| r(c.value)).unwrap_or_default(),
        p.cond_estimate.map(|c| c.method.to_string()).unwrap_or_default(),
    ])?;
    finish(w)
}

pub fn write_picard(out: &mut dyn Write, run: &PicardRun) -> Result<()> {
    let mut w = table(
        out,
        &[
            "iteration",
            "nonlinear_residual",
            "epsilon",
            "tau",
            "linear_iterations",
            "linear_converged",
            "termination",
        ],
    )?;
    for s in &run.history {
        w.write_record([
            s.iteration.to_string(),
            r(s.nonlinear_residual),
            r(s.epsilon),
            r(s.tau),
            s.linear_iterations.to_string(),
            s.linear_converged.to_string(),
            run.termination.to_string(),
        ])?;
    }
    finish(w)
}
