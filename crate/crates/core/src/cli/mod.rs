//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit code: 0 on success, 1 when a validation
//! criterion or a computation fails, 2 for configuration and usage errors.

mod config;
mod output;

pub use config::{
    CorrSection, McSection, MomentsSection, OutputFormat, PmfSection, RunConfig, SimulateSection, ValidateSection,
    ENV_OUT_DIR, ENV_THREADS,
};

use crate::analytic::{clock_moment, corr_decay_fit, factorial_moments, moments_summary, pmf_table, raw_moments, DerivedConstants};
use crate::error::Error;
use crate::mc::{par_collect, McConfig};
use crate::process::{sample_process, SkellamPath, TimeChange};
use crate::stats::geomspace;
use crate::validation::{run_suite, Suite, ValidationOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{Meta, Writer};
use serde_json::json;
use std::ffi::OsString;
use std::path::PathBuf;
use thiserror::Error as ThisError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fracskellam", version, about = "Simulate and tabulate time-changed generalized Skellam processes")]
pub struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Monte Carlo seed (overrides mc.seed)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (overrides out_dir)
    #[arg(long, global = true, env = ENV_OUT_DIR)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample paths and write them in long format (path_id, t, value)
    Simulate(SimulateArgs),
    /// Tabulate state probabilities
    Pmf(PmfArgs),
    /// Tabulate factorial and raw moments, mean and variance
    Moments(MomentsArgs),
    /// Correlation decay and its log-log exponent
    Corr(CorrArgs),
    /// Run the validation criteria
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    /// Evaluation times
    #[arg(long = "t", value_delimiter = ',')]
    pub times: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long = "t", value_delimiter = ',')]
    pub times: Vec<f64>,
    #[arg(long)]
    pub r_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Correlate increments of this length instead of values
    #[arg(long)]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Quick,
    Full,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub suite: Option<SuiteArg>,
    /// Criterion ids to run (default: all)
    #[arg(long = "criterion", value_delimiter = ',')]
    pub criteria: Vec<u8>,
    /// Added to λ₁ on the analytic side only; any nonzero value should fail
    #[arg(long)]
    pub perturb_lambda1: Option<f64>,
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Failed(String),
    #[error("validation failed: {failed} of {total} criteria")]
    Validation { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            _ => EXIT_FAILED,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => CliError::Config(m),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("io: {e}"))
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Messages go to stderr, written files to stdout.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// File config with flag and environment overrides applied.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(CliError::Config)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.mc.seed = Some(seed);
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(f) = cli.format {
        cfg.output = f;
    }
    if let Ok(v) = std::env::var(ENV_THREADS) {
        let n = v.parse().map_err(|_| CliError::Config(format!("{ENV_THREADS}={v} is not a thread count")))?;
        cfg.threads = Some(n);
    }
    match &cli.command {
        Command::Simulate(a) => {
            if let Some(n) = a.paths {
                cfg.mc.n_paths = n;
            }
            if let Some(t) = a.t_end {
                cfg.simulate.t_end = t;
                cfg.simulate.times = None;
            }
            if let Some(s) = a.steps {
                cfg.simulate.steps = s;
                cfg.simulate.times = None;
            }
        }
        Command::Pmf(a) if !a.times.is_empty() => cfg.pmf.times = a.times.clone(),
        Command::Pmf(_) => {}
        Command::Moments(a) => {
            if !a.times.is_empty() {
                cfg.moments.times = a.times.clone();
            }
            if let Some(r) = a.r_max {
                cfg.moments.r_max = r;
            }
        }
        Command::Corr(a) => {
            let c = &mut cfg.corr;
            c.s = a.s.unwrap_or(c.s);
            c.t_start = a.t_start.unwrap_or(c.t_start);
            c.t_end = a.t_end.unwrap_or(c.t_end);
            c.points = a.points.unwrap_or(c.points);
            if a.h.is_some() {
                c.h = a.h;
            }
        }
        Command::Validate(a) => {
            if let Some(s) = a.suite {
                cfg.validate.suite = match s {
                    SuiteArg::Quick => Suite::Quick,
                    SuiteArg::Full => Suite::Full,
                };
            }
            if !a.criteria.is_empty() {
                cfg.validate.criteria = a.criteria.clone();
            }
            if let Some(p) = a.perturb_lambda1 {
                cfg.validate.perturb_lambda1 = p;
            }
        }
    }
    cfg.process.validate()?;
    cfg.eval.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = resolve_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Simulate(_) => cmd_simulate(&cfg),
        Command::Pmf(_) => cmd_pmf(&cfg),
        Command::Moments(_) => cmd_moments(&cfg),
        Command::Corr(_) => cmd_corr(&cfg),
        Command::Validate(_) => cmd_validate(&cfg),
    })
}

fn required_mc(cfg: &RunConfig, what: &str) -> Result<McConfig, CliError> {
    let mc = cfg
        .mc_config()
        .ok_or_else(|| CliError::Config(format!("{what} draws random numbers; pass --seed or set mc.seed")))?;
    mc.validate()?;
    Ok(mc)
}

/// Seeded controls when required; otherwise whatever was configured, since
/// the analytic path never draws from them.
fn analytic_mc(cfg: &RunConfig, what: &str) -> Result<McConfig, CliError> {
    if cfg.analytics_need_mc() {
        required_mc(cfg, what)
    } else {
        Ok(cfg.mc_config().unwrap_or(McConfig { n_paths: cfg.mc.n_paths, dt: cfg.mc.dt, seed: 0 }))
    }
}

/// Shortest round-trip representation.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn check_times(times: &[f64]) -> Result<(), CliError> {
    if times.is_empty() || times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(CliError::Config(format!("times must be positive and finite, got {times:?}")));
    }
    Ok(())
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mc = required_mc(cfg, "simulate")?;
    let sim = &cfg.simulate;
    let times = match &sim.times {
        Some(t) => t.clone(),
        None => {
            if sim.steps == 0 || !(sim.t_end > 0.0) {
                return Err(CliError::Config("simulate needs steps >= 1 and t_end > 0".into()));
            }
            (1..=sim.steps).map(|i| sim.t_end * i as f64 / sim.steps as f64).collect()
        }
    };
    check_times(&times)?;
    let draws: Vec<Result<SkellamPath, Error>> =
        par_collect(mc.n_paths, mc.seed, |rng, _| Ok(sample_process(&cfg.process, &times, rng, &mc)))?;
    let mut paths = Vec::with_capacity(draws.len());
    for (i, d) in draws.into_iter().enumerate() {
        paths.push(d.map_err(|e| CliError::Failed(format!("path {i}: {e}")))?);
    }
    let meta = Meta::new("simulate", cfg, Some(&mc), json!({ "times": times }));
    let rows = paths
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.grid.iter().zip(&p.values).map(move |(t, v)| (i, *t, *v)));
    let mut w = Writer::new(cfg, "paths", &meta)?;
    w.csv(&["path_id", "t", "value"], rows.map(|(i, t, v)| vec![i.to_string(), num(t), v.to_string()]))?;
    w.json(json!({ "paths": paths }))?;
    w.finish()
}

pub fn cmd_pmf(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    check_times(&cfg.pmf.times)?;
    let mc = analytic_mc(cfg, "pmf for this clock")?;
    let tables = cfg.pmf.times.iter().map(|&t| pmf_table(&cfg.process, t, &cfg.eval, &mc)).collect::<Result<Vec<_>, _>>()?;
    let summary: Vec<_> = tables
        .iter()
        .map(|tb| json!({ "t": tb.t, "n_min": tb.n_min, "n_max": tb.n_max, "total": tb.total(), "tail_mass_bound": tb.tail_mass_bound }))
        .collect();
    let meta = Meta::new("pmf", cfg, cfg.analytics_need_mc().then_some(&mc), json!({ "times": cfg.pmf.times, "tables": summary }));
    let mut w = Writer::new(cfg, "pmf", &meta)?;
    let rows = tables.iter().flat_map(|tb| tb.support().map(move |(n, p)| vec![num(tb.t), n.to_string(), num(p)]));
    w.csv(&["t", "n", "value"], rows)?;
    w.json(json!({ "tables": tables }))?;
    w.finish()
}

pub fn cmd_moments(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let m = &cfg.moments;
    check_times(&m.times)?;
    if m.r_max == 0 {
        return Err(CliError::Config("r_max must be at least 1".into()));
    }
    let mc = analytic_mc(cfg, "moments for this clock")?;
    let p = &cfg.process;
    let l1 = DerivedConstants::new(&p.rates, p.alpha).l1;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &t in &m.times {
        let fact = factorial_moments(&p.rates, p.alpha, &p.time_change, m.r_max, t, &mc)?;
        let raw = raw_moments(&p.rates, p.alpha, &p.time_change, m.r_max, t, &mc)?;
        let summary = moments_summary(&p.rates, p.alpha, &p.time_change, t, t, &mc)?;
        let clock = match p.time_change {
            TimeChange::None => t.powf(p.alpha),
            tc => clock_moment(&tc, p.alpha, t, &mc)?.value,
        };
        let mut row = vec![num(t)];
        row.extend(fact.iter().copied().map(num));
        row.extend(raw.iter().copied().map(num));
        row.extend([summary.mean_t, summary.var_t, l1 * clock].map(num));
        rows.push(row);
        records.push(json!({
            "t": t, "factorial": fact, "raw": raw, "mean": summary.mean_t, "variance": summary.var_t,
            "l1_clock_moment": l1 * clock, "std_error": summary.std_error, "exact": summary.exact,
        }));
    }
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((1..=m.r_max).map(|r| format!("factorial_{r}")));
    header.extend((1..=m.r_max).map(|r| format!("raw_{r}")));
    header.extend(["mean", "variance", "l1_clock_moment"].map(String::from));
    let meta = Meta::new("moments", cfg, cfg.analytics_need_mc().then_some(&mc), json!({ "times": m.times, "r_max": m.r_max }));
    let mut w = Writer::new(cfg, "moments", &meta)?;
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    w.csv(&header, rows)?;
    w.json(json!({ "moments": records }))?;
    w.finish()
}

pub fn cmd_corr(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let c = &cfg.corr;
    if c.points < 3 || !(c.t_start > 0.0 && c.t_end > c.t_start) {
        return Err(CliError::Config("corr needs points >= 3 and 0 < t_start < t_end".into()));
    }
    let mc = analytic_mc(cfg, "correlation for this clock")?;
    let p = &cfg.process;
    let grid = geomspace(c.t_start, c.t_end, c.points);
    let fit = corr_decay_fit(&p.rates, p.alpha, &p.time_change, c.s, &grid, c.mode(), &mc)?;
    let params = json!({ "s": c.s, "mode": c.mode(), "exponent": fit.exponent, "c_s": fit.c_s, "fit_r2": fit.fit_r2 });
    let meta = Meta::new("corr", cfg, cfg.analytics_need_mc().then_some(&mc), params);
    let mut w = Writer::new(cfg, "corr", &meta)?;
    w.csv(&["t", "corr"], fit.t_grid.iter().zip(&fit.corr).map(|(t, r)| vec![num(*t), num(*r)]))?;
    w.json(json!({ "fit": fit }))?;
    w.finish()
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let v = &cfg.validate;
    let opts = ValidationOptions {
        suite: v.suite,
        seed: cfg.mc.seed.unwrap_or(ValidationOptions::default().seed),
        perturb_lambda1: v.perturb_lambda1,
    };
    let report = run_suite(&opts, &v.criteria)?;
    for c in &report.criteria {
        eprintln!("{}", c.line());
    }
    let meta = Meta::new("validate", cfg, None, json!({ "options": opts }));
    let mut w = Writer::new(cfg, "validation", &meta)?;
    let rows = report.criteria.iter().flat_map(|c| {
        c.checks.iter().map(move |k| {
            vec![c.id.to_string(), k.name.clone(), num(k.measured), k.threshold.clone(), k.passed.to_string()]
        })
    });
    w.csv(&["criterion", "check", "measured", "threshold", "passed"], rows)?;
    w.json(json!({ "report": report }))?;
    let files = w.finish()?;
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Validation { failed, total: report.criteria.len() });
    }
    Ok(files)
}
