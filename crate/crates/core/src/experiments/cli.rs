//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::experiments::config::{preset_config, ExperimentConfig, PRESETS};
use crate::experiments::output::{write_csv, write_csv_to, write_table, NamedCurve, OutputGuard, Plot};
use crate::experiments::runners::*;
use crate::linear::{LinearPolicyConfig, LinearPolicyKind};
use crate::policies::PolicyKind;

const ABOUT: &str = "Bootstrapped UCB bandit experiments.

Bootstrapped policies redraw B bootstrap weights for every arm in every
round, so one round costs about B times the number of past rewards and a
run of T rounds grows like B T^2. Worker threads are capped by the
BOOTUCB_THREADS environment variable.";

#[derive(Debug, Parser)]
#[command(name = "bootucb", version, about = "Bootstrapped UCB bandit experiments", long_about = ABOUT)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare confidence bounds for the mean of truncated-normal data.
    BoundCompare(BoundCompareArgs),
    /// Multi-armed bandit regret experiments.
    #[command(subcommand)]
    Mab(MabCommand),
    /// Regret of naive bootstrapped UCB against its linear lower bound.
    NaiveRegret(NaiveArgs),
    /// Linear bandit experiments.
    #[command(subcommand)]
    Linear(LinearCommand),
    /// Miscoverage of the corrected threshold on symmetric populations.
    CoverageTest(CoverageArgs),
    /// Built-in presets.
    #[command(subcommand)]
    Presets(PresetsCommand),
}

#[derive(Debug, Subcommand)]
pub enum MabCommand {
    /// Regret curves from a JSON config or a preset.
    Run(MabRunArgs),
    /// Final regret over a grid of gaps.
    GapSweep(GapSweepArgs),
    /// Final regret over plug-in noise bounds.
    SigmaSweep(SigmaSweepArgs),
}

#[derive(Debug, Subcommand)]
pub enum LinearCommand {
    /// Regret curves of linear bandit policies.
    Run(LinearArgs),
}

#[derive(Debug, Subcommand)]
pub enum PresetsCommand {
    /// Print every built-in preset.
    List,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MabRunArgs {
    /// JSON experiment config.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Preset name, see `presets list`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Horizon; overrides the config.
    #[arg(long = "T")]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub base_seed: Option<u64>,
    /// Bootstrap repetitions for the bootstrapped policies.
    #[arg(long)]
    pub reps: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GapSweepArgs {
    /// Comma-separated gaps.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    #[arg(long = "T", default_value_t = 2000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 50)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SigmaSweepArgs {
    /// Comma-separated plug-in noise bounds.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0])]
    pub sigmas: Vec<f64>,
    #[arg(long, default_value = "gaussian-K5")]
    pub preset: String,
    #[arg(long, value_delimiter = ',', default_values_t = ["bucb".to_string(), "ucb1".to_string(), "ts-jeffreys".to_string()])]
    pub policies: Vec<String>,
    #[arg(long = "T", default_value_t = 2000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 50)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NaiveArgs {
    #[arg(long, default_value_t = 0.9)]
    pub mu1: f64,
    #[arg(long, default_value_t = 0.8)]
    pub mu2: f64,
    #[arg(long = "T", default_value_t = 1000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 500)]
    pub seeds: usize,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LinearArgs {
    #[arg(long, default_value_t = 10)]
    pub dim: usize,
    #[arg(long, value_delimiter = ',', default_values_t = ["oful".to_string(), "tsl".to_string(), "bucbl".to_string()])]
    pub policies: Vec<String>,
    #[arg(long = "T", default_value_t = 1000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 50)]
    pub seeds: usize,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundCompareArgs {
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Summaries go to `report`; CSV goes to `--out` or, without it, to
/// `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, report: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            write!(stdout, "{e}")?;
            return Ok(());
        }
        Err(e) => return Err(crate::Error::Config(e.to_string())),
    };
    execute(&cli.command, stdout, report)
}

fn emit_curves(curves: &[NamedCurve], title: &str, out: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut guard = OutputGuard::new();
    match &out.out {
        Some(path) => guard.write_with(path, |p| write_csv(curves, p))?,
        None => write_csv_to(curves, &mut *stdout)?,
    }
    if let Some(path) = &out.svg {
        guard.write_with(path, |p| Plot::regret(title, curves).write(p))?;
    }
    guard.commit();
    Ok(())
}

fn emit_table<T: serde::Serialize>(
    rows: &[T],
    plot: Option<Plot>,
    out: &OutputArgs,
    stdout: &mut dyn Write,
) -> Result<()> {
    let mut guard = OutputGuard::new();
    match &out.out {
        Some(path) => guard.write_with(path, |p| write_table(rows, std::fs::File::create(p)?))?,
        None => write_table(rows, &mut *stdout)?,
    }
    if let (Some(path), Some(plot)) = (&out.svg, plot) {
        guard.write_with(path, |p| plot.write(p))?;
    }
    guard.commit();
    Ok(())
}

fn summarize(curves: &[NamedCurve], report: &mut dyn Write) -> Result<()> {
    for c in curves {
        writeln!(
            report,
            "{:<14} final regret {:>12.4} ± {:.4} ({} seeds)",
            c.policy,
            c.curve.final_mean(),
            c.curve.final_stderr(),
            c.curve.n_seeds
        )?;
    }
    Ok(())
}

fn load_run_config(args: &MabRunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => preset_config(name)?,
        (None, None) => return Err(crate::Error::Config("`mab run` needs --config or --preset".into())),
    };
    if let Some(t) = args.horizon {
        cfg.horizon = t;
    }
    if let Some(n) = args.seeds {
        cfg.n_seeds = n;
    }
    if let Some(s) = args.base_seed {
        cfg.base_seed = s;
    }
    if let Some(b) = args.reps {
        cfg.policies.iter_mut().for_each(|p| p.bootstrap.reps = b);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_output(flags: &OutputArgs, cfg: &ExperimentConfig) -> OutputArgs {
    OutputArgs {
        out: flags.out.clone().or_else(|| cfg.output.csv.clone()),
        svg: flags.svg.clone().or_else(|| cfg.output.svg.clone()),
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write, report: &mut dyn Write) -> Result<()> {
    match command {
        Command::Presets(PresetsCommand::List) => {
            for p in PRESETS {
                writeln!(stdout, "{:<22} {:<16} {}", p.name, p.command, p.summary)?;
            }
        }
        Command::Mab(MabCommand::Run(args)) => {
            let cfg = load_run_config(args)?;
            let curves = mab_run(&cfg)?;
            let title = cfg.name.clone().unwrap_or_else(|| "cumulative regret".into());
            emit_curves(&curves, &title, &resolve_output(&args.output, &cfg), stdout)?;
            summarize(&curves, report)?;
        }
        Command::Mab(MabCommand::GapSweep(args)) => {
            let mut cfg = GapSweepConfig {
                horizon: args.horizon,
                n_seeds: args.seeds,
                base_seed: args.base_seed,
                ..Default::default()
            };
            if let Some(d) = &args.deltas {
                cfg.deltas = d.clone();
            }
            let rows = run_gap_sweep(&cfg)?;
            emit_table(&rows, Some(gap_sweep_plot(&rows)), &args.output, stdout)?;
            for r in &rows {
                writeln!(
                    report,
                    "delta {:<6} {:<12} {:>10.3} ± {:.3}",
                    r.delta, r.policy, r.mean_final, r.stderr_final
                )?;
            }
        }
        Command::Mab(MabCommand::SigmaSweep(args)) => {
            let cfg = SigmaSweepConfig {
                sigmas: args.sigmas.clone(),
                preset: args.preset.parse()?,
                policies: args.policies.iter().map(|p| p.parse::<PolicyKind>()).collect::<Result<_>>()?,
                horizon: args.horizon,
                n_seeds: args.seeds,
                base_seed: args.base_seed,
            };
            let rows = sigma_sweep(&cfg)?;
            emit_table(&rows, Some(sigma_sweep_plot(&rows)), &args.output, stdout)?;
            for p in &cfg.policies {
                if let Some(r) = sigma_ratio(&rows, p.name()) {
                    writeln!(report, "{:<12} regret ratio largest/smallest sigma {r:.3}", p.name())?;
                }
            }
        }
        Command::NaiveRegret(args) => {
            let cfg = NaiveRegretConfig {
                mu: [args.mu1, args.mu2],
                horizon: args.horizon,
                n_seeds: args.seeds,
                reps: args.reps,
                base_seed: args.base_seed,
            };
            let rep = naive_regret(&cfg)?;
            emit_curves(std::slice::from_ref(&rep.curve), "naive bootstrapped UCB", &args.output, stdout)?;
            writeln!(report, "mean final regret {:.4} ± {:.4}", rep.mean_final, rep.stderr_final)?;
            writeln!(report, "lower bound       {:.4}", rep.lower_bound)?;
            writeln!(report, "slope first half {:.5}, second half {:.5}", rep.early_slope, rep.late_slope)?;
        }
        Command::Linear(LinearCommand::Run(args)) => {
            let policies = args
                .policies
                .iter()
                .map(|p| {
                    let mut c = LinearPolicyConfig::new(p.parse::<LinearPolicyKind>()?);
                    c.reps = args.reps;
                    Ok(c)
                })
                .collect::<Result<_>>()?;
            let cfg = LinearRunConfig {
                dim: args.dim,
                policies,
                horizon: args.horizon,
                n_seeds: args.seeds,
                base_seed: args.base_seed,
            };
            let curves = linear_run(&cfg)?;
            emit_curves(&curves, "linear bandit regret", &args.output, stdout)?;
            summarize(&curves, report)?;
        }
        Command::BoundCompare(args) => {
            let mut cfg =
                BoundCompareConfig { trials: args.trials, reps: args.reps, seed: args.seed, ..Default::default() };
            if let Some(s) = &args.sizes {
                cfg.sizes = s.clone();
            }
            let rows = bound_compare(&cfg)?;
            emit_table(&rows, Some(bound_compare_plot(&rows)), &args.output, stdout)?;
            for r in rows.iter().filter(|r| r.method == "corrected" || r.method == "naive") {
                writeln!(report, "n {:<5} {:<10} coverage {:.4} width {:.4}", r.n, r.method, r.coverage, r.mean_width)?;
            }
        }
        Command::CoverageTest(args) => {
            let mut cfg =
                CoverageConfig { trials: args.trials, reps: args.reps, seed: args.seed, ..Default::default() };
            if let Some(s) = &args.sizes {
                cfg.sizes = s.clone();
            }
            let rows = coverage_test(&cfg)?;
            emit_table(&rows, None, &OutputArgs { out: args.out.clone(), svg: None }, stdout)?;
            for r in &rows {
                writeln!(
                    report,
                    "{} {:<16} n {:<3} miscoverage {:.4} limit {:.4}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.population,
                    r.n,
                    r.miscoverage,
                    r.limit
                )?;
            }
        }
    }
    Ok(())
}

/// Entry point of the binary: returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr();
    match run(args, &mut stdout, &mut stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
