//! Scenario runner behind the `backflow` binary.

pub mod audit;
pub mod config;
pub mod output;
pub mod presets;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::blp::{self, MonotonicityProfile};
use crate::dephasing::{analytic_surface, discretize, full_model, k_closed, DephasingSpec, FrequencyDistribution};
use crate::error::Error;
use crate::qla::{basis_ket, c64};
use crate::spinchain;
use crate::states::{decompose, BipartiteState};
use crate::witness::{self, Classification, ScenarioPair, WitnessSurface, INVARIANT_TOL};
use config::{DephasingModel, GridSpec, RunConfig, ScenarioConfig};
use output::{Labelled, RunSummary, SweepEntry};

pub const WORKERS_ENV: &str = "BACKFLOW_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidArgument(_) | Error::DimensionMismatch(_) | Error::Io(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub files: Vec<PathBuf>,
}

/// Replaces a preset reference by its definition; explicit grids,
/// tolerances and output settings in `cfg` win over the preset's.
pub fn resolve(cfg: &RunConfig) -> Result<(String, RunConfig), CliError> {
    match &cfg.scenario {
        ScenarioConfig::Preset { name } => {
            let base = presets::preset(name).ok_or_else(|| CliError::Config(format!("unknown preset '{name}'")))?;
            Ok((
                name.clone(),
                RunConfig {
                    scenario: base.scenario,
                    t_grid: cfg.t_grid.or(base.t_grid),
                    tprime_grid: cfg.tprime_grid.or(base.tprime_grid),
                    tolerances: cfg.tolerances,
                    output: cfg.output.clone(),
                },
            ))
        }
        other => {
            let name = match other {
                ScenarioConfig::Dephasing { .. } => "dephasing",
                ScenarioConfig::SpinChain(_) => "spin_chain",
                ScenarioConfig::RSweep { .. } => "r_sweep",
                ScenarioConfig::BellCheck => "bell_check",
                ScenarioConfig::Preset { .. } => unreachable!(),
            };
            Ok((name.to_string(), cfg.clone()))
        }
    }
}

fn grid(spec: Option<GridSpec>, name: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.ok_or_else(|| CliError::Config(format!("{name} is required for this scenario")))?;
    spec.validate(name)?;
    Ok(spec.points())
}

struct Evaluated {
    surfaces: Vec<(Option<f64>, WitnessSurface)>,
    profiles: Vec<(Option<f64>, MonotonicityProfile)>,
}

fn evaluate_pair(sc: &ScenarioPair, t: &[f64], tp: &[f64], cfg: &RunConfig) -> Result<Evaluated, CliError> {
    let surface = witness::surface(sc, t, tp, cfg.tolerances.class_eps)?;
    let profile = blp::monotonicity_profile(sc, t, cfg.tolerances.rise_tol)?;
    Ok(Evaluated { surfaces: vec![(None, surface)], profiles: vec![(None, profile)] })
}

fn dephasing_profile(spec: &DephasingSpec, t: &[f64], rise_tol: f64) -> Result<MonotonicityProfile, CliError> {
    let d: Vec<f64> = t.iter().map(|&x| k_closed(spec, x).norm()).collect();
    Ok(blp::increasing_intervals(t, &d, rise_tol)?)
}

fn bell_correlation_norm() -> Result<f64, CliError> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = (basis_ket(4, 0) + basis_ket(4, 3)) * c64(s, 0.0);
    Ok(decompose(&BipartiteState::pure(psi, 2, 2)?)?.correlation_norm())
}

/// Executes a configuration and writes its output files into `out_dir`
/// (default: the configured output path).
pub fn run(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<RunOutcome, CliError> {
    let (name, cfg) = resolve(cfg)?;
    let tol = cfg.tolerances;
    if !(tol.class_eps >= 0.0 && tol.rise_tol >= 0.0) {
        return Err(CliError::Config("tolerances must be nonnegative".into()));
    }
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.path.clone());
    let format = cfg.output.format;
    let mut summary = RunSummary::new(&name);
    let mut files = Vec::new();

    let evaluated = match &cfg.scenario {
        ScenarioConfig::BellCheck => {
            let norm = bell_correlation_norm()?;
            summary.correlation_norm = Some(norm);
            files.push(output::write_file(&dir, "summary.json", &summary.to_json())?);
            if (norm - 1.5).abs() > 1e-12 {
                return Err(CliError::Invariant(format!("Bell correlation norm {norm} differs from 3/2")));
            }
            return Ok(RunOutcome { summary, files });
        }
        ScenarioConfig::Dephasing { distribution, model, bins, window } => {
            let t = grid(cfg.t_grid, "t_grid")?;
            let tp = grid(cfg.tprime_grid.or(cfg.t_grid), "tprime_grid")?;
            match model {
                DephasingModel::Analytic => {
                    let spec = DephasingSpec::new(distribution.clone())?;
                    let surface = analytic_surface(&spec, &t, &tp, tol.class_eps)?;
                    let profile = dephasing_profile(&spec, &t, tol.rise_tol)?;
                    Evaluated { surfaces: vec![(None, surface)], profiles: vec![(None, profile)] }
                }
                DephasingModel::Full => {
                    let env = match distribution {
                        FrequencyDistribution::Discrete { .. } => distribution.clone(),
                        other => discretize(other, *bins, *window)?,
                    };
                    evaluate_pair(&full_model(&env)?, &t, &tp, &cfg)?
                }
            }
        }
        ScenarioConfig::SpinChain(spec) => {
            let t = grid(cfg.t_grid, "t_grid")?;
            let tp = grid(cfg.tprime_grid.or(cfg.t_grid), "tprime_grid")?;
            evaluate_pair(&spinchain::scenario(spec)?, &t, &tp, &cfg)?
        }
        ScenarioConfig::RSweep { omega0_1, delta1, omega0_2, delta2, r_values, tprime } => {
            let t = grid(cfg.t_grid, "t_grid")?;
            if r_values.is_empty() {
                return Err(CliError::Config("r_values is empty".into()));
            }
            if !(*tprime >= 0.0 && tprime.is_finite()) {
                return Err(CliError::Config(format!("tprime = {tprime} must be a nonnegative time")));
            }
            let mut ev = Evaluated { surfaces: Vec::new(), profiles: Vec::new() };
            for &r in r_values {
                let spec = DephasingSpec::new(FrequencyDistribution::DoubleLorentzian {
                    omega0_1: *omega0_1,
                    delta1: *delta1,
                    omega0_2: *omega0_2,
                    delta2: *delta2,
                    r,
                })?;
                let surface = analytic_surface(&spec, &t, &[*tprime], tol.class_eps)?;
                let profile = dephasing_profile(&spec, &t, tol.rise_tol)?;
                summary.sweep.push(SweepEntry {
                    r,
                    measure: profile.measure(),
                    guaranteed_increase: surface.count(Classification::GuaranteedIncrease),
                    max_b: surface.points().map(|p| p.b).fold(0.0, f64::max),
                    max_excess: surface.points().map(|p| p.b - p.d_t - p.f).fold(f64::NEG_INFINITY, f64::max),
                });
                ev.surfaces.push((Some(r), surface));
                ev.profiles.push((Some(r), profile));
            }
            ev
        }
        ScenarioConfig::Preset { .. } => unreachable!("presets are resolved"),
    };

    for (_, s) in &evaluated.surfaces {
        summary.add_surface(s);
    }
    if evaluated.profiles.len() == 1 {
        summary.measure = Some(evaluated.profiles[0].1.measure());
    }

    let ext = output::extension(format);
    let surfaces: Vec<Labelled<WitnessSurface>> =
        evaluated.surfaces.iter().map(|(r, s)| Labelled { r: *r, item: s }).collect();
    let profiles: Vec<Labelled<MonotonicityProfile>> =
        evaluated.profiles.iter().map(|(r, p)| Labelled { r: *r, item: p }).collect();
    files.push(output::write_file(&dir, &format!("surface.{ext}"), &output::surface_text(&surfaces, format)?)?);
    files.push(output::write_file(&dir, &format!("profile.{ext}"), &output::profile_text(&profiles, format)?)?);
    files.push(output::write_file(&dir, "summary.json", &summary.to_json())?);

    if summary.max_violation > INVARIANT_TOL {
        return Err(CliError::Invariant(format!("sandwich violated by {:.3e}", summary.max_violation)));
    }
    Ok(RunOutcome { summary, files })
}

/// Sizes the global worker pool from `BACKFLOW_WORKERS` when it is set.
pub fn configure_workers() -> Result<(), CliError> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got '{value}'")))?;
    // A pool that already exists keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "backflow", version, about = "Trace-distance witnesses of non-Markovian dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a TOML configuration or a named preset.
    Run {
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Output directory, overriding the configured path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in presets.
    ListPresets,
    /// Run the invariant suite and print one line per check.
    Audit,
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::ListPresets => {
            print!("{}", presets::list_presets());
            Ok(())
        }
        Command::Audit => {
            configure_workers()?;
            let checks = audit::run_audit();
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::Invariant(format!("{failed} audit check(s) failed")));
            }
            Ok(())
        }
        Command::Run { config, preset, out } => {
            configure_workers()?;
            let cfg = match (config, preset) {
                (Some(path), None) => RunConfig::load(&path)?,
                (None, Some(name)) => {
                    presets::preset(&name).ok_or_else(|| CliError::Config(format!("unknown preset '{name}'")))?
                }
                _ => return Err(CliError::Config("give either a config path or --preset".into())),
            };
            let outcome = run(&cfg, out.as_deref())?;
            print!("{}", outcome.summary.to_json());
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
