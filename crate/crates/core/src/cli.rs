//! Command-line front end for the `equisolve` binary.
//!
//! Settings resolve in the order: command-line flag, then `--config` file
//! (`key = value` lines, `#` comments, keys spelled like the long flags),
//! then built-in defaults.
//!
//! Exit codes: 0 when every requested run converged, 1 on a numerical
//! failure or a run that did not converge, 2 on a usage error.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{cmd_bench, cmd_omega_sweep, picard_solve, BenchOptions, PicardOptions, PicardTermination};
use crate::error::{Error, Result};
use crate::error_control::{default_taus, error_study, StudyOptions};
use crate::ilut::IlutParams;
use crate::mm;
use crate::profile::profile_with_cap;
use crate::report;
use crate::scaling::{ScalingMode, ScalingOp};
use crate::solvers::{solve_system, SolveOptions, SolverConfig, SolverKind};
use crate::sparse::{CsrMatrix, DEFAULT_DENSE_CAP};
use crate::testgen::{generate, spec_suite, suite_member, ProblemSpec};

#[derive(Parser, Debug)]
#[command(name = "equisolve", version, about = "Scaled, preconditioned sparse iterative solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one system and print a one-row report.
    Solve(SolveArgs),
    /// Dimension, fill, normality and (optionally) condition number.
    Profile(ProfileArgs),
    /// Exact forward error versus Ferr and ε over a τ sweep, with and without scaling.
    Study(StudyArgs),
    /// Iteration counts and timings of PGMRES and SOR over a τ sweep.
    Bench(BenchArgs),
    /// SOR sweep counts over a list of relaxation parameters.
    OmegaSweep(OmegaArgs),
    /// Picard iteration with the dynamic tolerance τ_k = ε‖b_k‖_*.
    Picard(PicardArgs),
    /// Write generated test systems as Matrix Market files.
    Generate(GenerateArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct SourceArgs {
    /// Matrix Market coordinate file.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Matrix Market array file with the right-hand side (default b = A·1).
    #[arg(long, requires = "matrix")]
    pub rhs: Option<PathBuf>,
    /// Generated suite member: WELL, SKEW, ILL6 or ILL9.
    #[arg(long, conflicts_with = "matrix")]
    pub suite: Option<String>,
    /// Seed for generated systems.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` settings file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SolverArgs {
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    /// Absolute residual tolerance τ.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Normalized tolerance ε; sets τ = ε‖D⁻¹b‖₂ and overrides --tol.
    #[arg(long)]
    pub eps: Option<f64>,
    /// GMRES restart length.
    #[arg(long)]
    pub restart: Option<usize>,
    /// SOR relaxation parameter.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Budget of GMRES inner iterations or SOR sweeps.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Row equilibration.
    #[arg(long, value_enum)]
    pub scale: Option<ScalingMode>,
    /// ILUT drop tolerance.
    #[arg(long)]
    pub droptol: Option<f64>,
    /// ILUT fill per factor row.
    #[arg(long)]
    pub lfil: Option<usize>,
    /// Second Gram-Schmidt pass in every Arnoldi step.
    #[arg(long)]
    pub reorthogonalize: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Also compute κ₁(A).
    #[arg(long)]
    pub cond: bool,
    /// Largest n for dense condition numbers.
    #[arg(long)]
    pub dense_cap: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct StudyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// `1e-1..1e-8` (decades) or a comma-separated list.
    #[arg(long)]
    pub taus: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub dense_cap: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub taus: Option<String>,
    /// Comma-separated solver list (default: pgmres,sor).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub solvers: Vec<SolverKind>,
    /// Timing repeats per cell.
    #[arg(long)]
    pub repeat: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OmegaArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// `start:stop:step` or a comma-separated list (default 1.0:1.9:0.1).
    #[arg(long)]
    pub omegas: Option<String>,
    #[arg(long)]
    pub repeat: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PicardArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Nonlinearity strength ν.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Suite member to write; all four when omitted and no grid is given.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Custom grid instead of a suite member.
    #[arg(long, conflicts_with = "suite")]
    pub nx: Option<usize>,
    #[arg(long, requires = "nx")]
    pub ny: Option<usize>,
    #[arg(long, requires = "nx")]
    pub layers: Option<usize>,
    #[arg(long, requires = "nx")]
    pub streams: Option<usize>,
    #[arg(long, requires = "nx")]
    pub stream_scale: Option<f64>,
    #[arg(long, requires = "nx")]
    pub asymmetry: Option<f64>,
    #[arg(long, requires = "nx")]
    pub storage: Option<f64>,
    /// File stem for a custom grid.
    #[arg(long, default_value = "custom")]
    pub name: String,
    /// Output directory for the `.mtx` files; the file list goes to stdout.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

const CONFIG_KEYS: &[&str] = &[
    "solver", "tol", "eps", "restart", "omega", "max-iters", "scale", "droptol", "lfil",
    "reorthogonalize", "repeat", "seed", "taus", "omegas", "solvers", "nu", "max-outer", "cond",
    "dense-cap", "suite",
];

/// Values read from a `--config` file.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: HashMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let key = k.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "config line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                    path: p.to_path_buf(),
                    source,
                })?;
                Self::parse(&text)
            }
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidConfig(format!("config {key}: cannot parse {v:?}")))
            })
            .transpose()
    }

    pub fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                T::from_str(v, true)
                    .map_err(|_| Error::InvalidConfig(format!("config {key}: unknown value {v:?}")))
            })
            .transpose()
    }
}

fn pick<T: FromStr>(flag: Option<T>, cfg: &Settings, key: &str, default: T) -> Result<T> {
    Ok(match flag {
        Some(v) => v,
        None => cfg.get(key)?.unwrap_or(default),
    })
}

/// Solver, scaling and ILUT settings after applying the precedence rules.
pub fn resolve_solve_options(args: &SolverArgs, cfg: &Settings) -> Result<SolveOptions> {
    let d = SolverConfig::default();
    let di = IlutParams::default();
    let solver = match args.solver {
        Some(s) => s,
        None => cfg.get_enum("solver")?.unwrap_or(SolverKind::Pgmres),
    };
    let scaling = match args.scale {
        Some(s) => s,
        None => cfg.get_enum("scale")?.unwrap_or_default(),
    };
    let epsilon = match args.eps {
        Some(e) => Some(e),
        None => cfg.get("eps")?,
    };
    let config = SolverConfig {
        tau: pick(args.tol, cfg, "tol", d.tau)?,
        epsilon,
        restart: pick(args.restart, cfg, "restart", d.restart)?,
        max_iters: pick(args.max_iters, cfg, "max-iters", d.max_iters)?,
        omega: pick(args.omega, cfg, "omega", d.omega)?,
        reorthogonalize: args.reorthogonalize || cfg.get("reorthogonalize")?.unwrap_or(false),
        track_orthogonality: false,
    };
    config.validate()?;
    let mut ilut = di;
    ilut.droptol = pick(args.droptol, cfg, "droptol", di.droptol)?;
    ilut.lfil = pick(args.lfil, cfg, "lfil", di.lfil)?;
    if !(ilut.droptol >= 0.0 && ilut.droptol.is_finite()) {
        return Err(Error::InvalidConfig(format!("droptol must be non-negative, got {}", ilut.droptol)));
    }
    Ok(SolveOptions {
        solver,
        config,
        scaling,
        ilut,
    })
}

/// Parses `a..b` (powers of ten, one per decade) or a comma-separated list.
pub fn parse_taus(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("cannot parse tolerance list {s:?}"));
    let taus: Vec<f64> = if let Some((a, b)) = s.split_once("..") {
        let exp = |v: &str| -> Result<i32> {
            let x: f64 = v.trim().parse().map_err(|_| bad())?;
            let e = x.log10().round();
            if !(x > 0.0) || (x / 10f64.powi(e as i32) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "range endpoints must be powers of ten, got {v:?}"
                )));
            }
            Ok(e as i32)
        };
        let (ea, eb) = (exp(a)?, exp(b)?);
        let step = if ea >= eb { -1 } else { 1 };
        let mut out = Vec::new();
        let mut e = ea;
        loop {
            out.push(format!("1e{e}").parse().map_err(|_| bad())?);
            if e == eb {
                break;
            }
            e += step;
        }
        out
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if taus.is_empty() || taus.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(bad());
    }
    Ok(taus)
}

/// Parses `start:stop:step` or a comma-separated list of ω values.
pub fn parse_omegas(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("cannot parse omega list {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let omegas: Vec<f64> = if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((start + i as f64 * step) * 1e10).round() / 1e10)
            .collect()
    } else if parts.len() == 1 {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    } else {
        return Err(bad());
    };
    if omegas.is_empty() || omegas.iter().any(|w| !(*w > 0.0 && *w < 2.0)) {
        return Err(Error::InvalidConfig(format!("omega values must lie in (0, 2): {s:?}")));
    }
    Ok(omegas)
}

/// A system ready for the subcommands.
#[derive(Debug, Clone)]
pub struct LoadedSystem {
    pub name: String,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub x_true: Option<Vec<f64>>,
}

/// Reads `--matrix`/`--rhs` or generates `--suite` (falling back to
/// `default_suite`).
pub fn load_source(src: &SourceArgs, cfg: &Settings, default_suite: Option<&str>) -> Result<LoadedSystem> {
    if let Some(path) = &src.matrix {
        let (matrix, rhs) = mm::read_system(path, src.rhs.as_deref())?;
        let rhs = match rhs {
            Some(b) => b,
            None => {
                log::info!("no right-hand side given; using b = A·1");
                matrix.spmv(&vec![1.0; matrix.n()])?
            }
        };
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "matrix".into());
        return Ok(LoadedSystem {
            name,
            matrix,
            rhs,
            x_true: None,
        });
    }
    let suite = match &src.suite {
        Some(s) => s.clone(),
        None => match cfg.raw("suite") {
            Some(s) => s.to_string(),
            None => default_suite
                .ok_or_else(|| Error::InvalidConfig("one of --matrix or --suite is required".into()))?
                .to_string(),
        },
    };
    let mut spec = suite_member(&suite)?;
    if let Some(seed) = pick_opt(src.seed, cfg, "seed")? {
        spec.seed = seed;
    }
    let p = generate(&spec)?;
    Ok(LoadedSystem {
        name: spec.name,
        matrix: p.matrix,
        rhs: p.rhs,
        x_true: Some(p.x_true),
    })
}

fn pick_opt<T: FromStr>(flag: Option<T>, cfg: &Settings, key: &str) -> Result<Option<T>> {
    Ok(match flag {
        Some(v) => Some(v),
        None => cfg.get(key)?,
    })
}

fn with_output<F>(path: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        None => f(stdout),
        Some(p) => {
            let file = File::create(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })
        }
    }
}

/// Runs a parsed command. `Ok(false)` means some run did not converge.
pub fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Solve(a) => {
            let cfg = Settings::load(a.output.config.as_deref())?;
            let opts = resolve_solve_options(&a.solver, &cfg)?;
            let sys = load_source(&a.source, &cfg, None)?;
            let rep = solve_system(&sys.matrix, &sys.rhs, &opts)?;
            let d = ScalingOp::equilibrate(&sys.matrix, opts.scaling)?;
            let r = sys.matrix.residual(&sys.rhs, &rep.report.solution)?;
            let rel = d.scaled_norm(&r)? / d.scaled_norm(&sys.rhs)?;
            with_output(a.output.out.as_deref(), stdout, |w| report::write_solve(w, &rep, rel))?;
            Ok(rep.report.converged())
        }
        Command::Profile(a) => {
            let cfg = Settings::load(a.output.config.as_deref())?;
            let sys = load_source(&a.source, &cfg, None)?;
            let with_cond = a.cond || cfg.get("cond")?.unwrap_or(false);
            let cap = pick(a.dense_cap, &cfg, "dense-cap", DEFAULT_DENSE_CAP)?;
            let p = profile_with_cap(&sys.matrix, with_cond, cap);
            with_output(a.output.out.as_deref(), stdout, |w| report::write_profile(w, &sys.name, &p))?;
            Ok(!with_cond || p.cond_estimate.is_some())
        }
        Command::Study(a) => {
            let cfg = Settings::load(a.output.config.as_deref())?;
            let solve = resolve_solve_options(&a.solver, &cfg)?;
            let sys = load_source(&a.source, &cfg, None)?;
            let taus = match pick_opt(a.taus.clone(), &cfg, "taus")? {
                Some(s) => parse_taus(&s)?,
                None => default_taus(),
            };
            let opts = StudyOptions {
                taus,
                modes: vec![solve.scaling, ScalingMode::None],
                config: solve.config,
                ilut: solve.ilut,
                dense_cap: pick(a.dense_cap, &cfg, "dense-cap", DEFAULT_DENSE_CAP)?,
            };
            let rows = error_study(&sys.matrix, &sys.rhs, &opts)?;
            with_output(a.output.out.as_deref(), stdout, |w| report::write_study(w, &rows))?;
            Ok(rows.iter().all(|r| r.converged && r.failure.is_none()))
        }
        Command::Bench(a) => {
            let cfg = Settings::load(a.output.config.as_deref())?;
            let solve = resolve_solve_options(&a.solver, &cfg)?;
            let sys = load_source(&a.source, &cfg, None)?;
            let taus = match pick_opt(a.taus.clone(), &cfg, "taus")? {
                Some(s) => parse_taus(&s)?,
                None => default_taus(),
            };
            let solvers = if !a.solvers.is_empty() {
                a.solvers.clone()
            } else if let Some(list) = cfg.raw("solvers") {
                list.split(',')
                    .map(|s| {
                        SolverKind::from_str(s.trim(), true)
                            .map_err(|_| Error::InvalidConfig(format!("unknown solver {s:?}")))
                    })
                    .collect::<Result<_>>()?
            } else {
                vec![SolverKind::Pgmres, SolverKind::Sor]
            };
            let opts = BenchOptions {
                taus,
                solvers,
                config: solve.config,
                scaling: solve.scaling,
                ilut: solve.ilut,
                repeat: pick(a.repeat, &cfg, "repeat", 3)?,
            };
            let rows = cmd_bench(&sys.matrix, &sys.rhs, &opts)?;
            with_output(a.output.out.as_deref(), stdout, |w| report::write_bench(w, &rows))?;
            Ok(rows.iter().all(|r| r.converged))
        }
        Command::OmegaSweep(a) => {
            let cfg = Settings::load(a.output.config.as_deref())?;
            let solve = resolve_solve_options(&a.solver, &cfg)?;
            let sys = load_source(&a.source, &cfg, None)?;
            let omegas = parse_omegas(&pick(a.omegas.clone(), &cfg, "omegas", "1.0:1.9:0.1".into())?)?;
            let opts = BenchOptions {
                config: solve.config.clone(),
                scaling: solve.scaling,
                ilut: solve.ilut,
                repeat: pick(a.repeat, &cfg, "repeat", 3)?,
                ..BenchOptions::default()
            };
            let sweep = cmd_omega_sweep(&sys.matrix, &sys.rhs, &omegas, solve.config.tau, &opts)?;
            with_output(a.output.out.as_deref(), stdout, |w| report::write_omega_sweep(w, &sweep))?;
            Ok(sweep.rows.iter().all(|r| r.converged))
        }
        Command::Picard(a) => {
            let cfg = Settings::load(a.output.config.as_deref())?;
            let mut solve = resolve_solve_options(&a.solver, &cfg)?;
            let epsilon = solve.config.epsilon.unwrap_or(1e-5);
            solve.config.epsilon = Some(epsilon);
            let sys = load_source(&a.source, &cfg, Some("WELL"))?;
            let h_star = match &sys.x_true {
                Some(x) => x.clone(),
                None => vec![1.0; sys.matrix.n()],
            };
            let defaults = PicardOptions::default();
            let opts = PicardOptions {
                nu: pick(a.nu, &cfg, "nu", defaults.nu)?,
                epsilon,
                max_outer: pick(a.max_outer, &cfg, "max-outer", defaults.max_outer)?,
                rtol: defaults.rtol,
                solve,
            };
            let run = picard_solve(&sys.matrix, &h_star, &opts)?;
            with_output(a.output.out.as_deref(), stdout, |w| report::write_picard(w, &run))?;
            Ok(run.termination == PicardTermination::Converged)
        }
        Command::Generate(a) => {
            let specs: Vec<ProblemSpec> = if let Some(nx) = a.nx {
                let mut s = ProblemSpec::new(&a.name, nx, a.ny.unwrap_or(nx), a.layers.unwrap_or(1));
                s.stream_nodes = a.streams.unwrap_or(0);
                s.stream_scale = a.stream_scale.unwrap_or(1.0);
                s.asymmetry = a.asymmetry.unwrap_or(0.0);
                s.storage = a.storage.unwrap_or(s.storage);
                vec![s]
            } else if let Some(name) = &a.suite {
                vec![suite_member(name)?]
            } else {
                spec_suite()
            };
            std::fs::create_dir_all(&a.out).map_err(|source| Error::Io {
                path: a.out.clone(),
                source,
            })?;
            writeln!(stdout, "{}", report::CSV_MAGIC).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })?;
            let mut w = csv::Writer::from_writer(&mut *stdout);
            w.write_record(["name", "dimension", "nnz", "matrix", "rhs", "x_true"])?;
            for mut spec in specs {
                if let Some(seed) = a.seed {
                    spec.seed = seed;
                }
                let p = generate(&spec)?;
                let stem = a.out.join(&spec.name);
                let paths = [
                    stem.with_extension("mtx"),
                    a.out.join(format!("{}_rhs.mtx", spec.name)),
                    a.out.join(format!("{}_xtrue.mtx", spec.name)),
                ];
                mm::write_matrix_file(&paths[0], &p.matrix)?;
                mm::write_vector_file(&paths[1], &p.rhs)?;
                mm::write_vector_file(&paths[2], &p.x_true)?;
                w.write_record([
                    spec.name.clone(),
                    p.matrix.n().to_string(),
                    p.matrix.nnz().to_string(),
                    paths[0].display().to_string(),
                    paths[1].display().to_string(),
                    paths[2].display().to_string(),
                ])?;
            }
            w.flush().map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })?;
            Ok(true)
        }
    }
}

fn is_usage_error(e: &Error) -> bool {
    match e {
        Error::InvalidConfig(_) | Error::Io { .. } | Error::MatrixMarket { .. } => true,
        Error::DimensionMismatch { .. } | Error::InvalidCsr(_) => true,
        Error::Stage { source, .. } => is_usage_error(source),
        _ => false,
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    2
                }
            };
        }
    };
    match dispatch(&cli, stdout) {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(stderr, "warning: at least one run did not converge");
            1
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if is_usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_ranges() {
        let t = parse_taus("1e-1..1e-8").unwrap();
        assert_eq!(t, default_taus());
        assert_eq!(parse_taus("1e-2, 1e-4").unwrap(), vec![1e-2, 1e-4]);
        assert!(parse_taus("3e-1..1e-2").is_err());
        assert!(parse_taus("-1").is_err());
    }

    #[test]
    fn omega_ranges() {
        let w = parse_omegas("1.0:1.9:0.1").unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(w[3], 1.3);
        assert_eq!(w[9], 1.9);
        assert!(parse_omegas("1.0,2.5").is_err());
    }

    #[test]
    fn config_precedence() {
        let cfg = Settings::parse("restart = 30\n# comment\nomega=1.5\nscale = none\n").unwrap();
        let args = SolverArgs {
            restart: Some(10),
            ..SolverArgs::default()
        };
        let opts = resolve_solve_options(&args, &cfg).unwrap();
        assert_eq!(opts.config.restart, 10);
        assert_eq!(opts.config.omega, 1.5);
        assert_eq!(opts.scaling, ScalingMode::None);
        assert_eq!(opts.config.max_iters, SolverConfig::default().max_iters);
        assert!(Settings::parse("bogus = 1").is_err());
    }
}
