//! Benchmark orchestrator: `run` executes one episode, `sweep` the full
//! (filter x level x seed) matrix with reports, `parse` recomputes metrics
//! from existing archives.
//!
//! Exit codes: 0 success (filter infeasibility is a finding, not a
//! failure), 1 usage or configuration error, 2 runtime error.

mod config;
mod runner;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use config::{parse_filter_name, render_config, BenchmarkConfig};
use runner::{execute_cell, persist_run, run_parse, run_sweep, RunCell};
use safebench::attack::{schedule_levels, AttackFamily, AttackSpec, IntensityLevel};
use safebench::filters::FilterStatus;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "safebench",
    about = "Safety-filter robustness benchmark: deterministic episodes, perception attacks, NPZ logs, CSV/JSON reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Benchmark config file (flat key = value format, versioned header).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Attack family override: none, noise, latency, crowding.
    #[arg(long)]
    attack: Option<String>,
    /// Episode length override.
    #[arg(long)]
    steps: Option<usize>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace run directories that already hold a data.npz.
    #[arg(long)]
    overwrite: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and write data.npz + metrics.json.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Safety filter to apply.
        #[arg(long)]
        filter: String,
        /// Episode seed.
        #[arg(long)]
        seed: u64,
        /// Attack intensity level: nominal, low, medium, high.
        #[arg(long)]
        level: Option<String>,
    },
    /// Run the full (filter x level x seed) matrix and emit reports.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Worker count (0 = all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Print the effective config and exit.
        #[arg(long)]
        dump_config: bool,
    },
    /// Recompute metrics from existing archives (no simulation).
    Parse {
        /// Archive files or directories to scan for .npz files.
        paths: Vec<PathBuf>,
        /// Report output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Errors that should exit with the usage/config code rather than the
/// runtime code.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(e: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(ConfigError(e))
}

fn load_config(common: &CommonArgs) -> Result<BenchmarkConfig> {
    let mut cfg = match &common.config {
        Some(path) => BenchmarkConfig::load(path).map_err(config_err)?,
        None => BenchmarkConfig::default(),
    };
    if let Some(name) = &common.attack {
        cfg.attack = match name.as_str() {
            "none" => None,
            other => Some(AttackFamily::from_name(other).ok_or_else(|| {
                config_err(anyhow!(
                    "unknown attack {other:?} (none, noise, latency, crowding)"
                ))
            })?),
        };
    }
    if let Some(steps) = common.steps {
        cfg.steps = Some(steps);
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

/// Resolve the attack of a single `run` invocation from the config's
/// family and the --level flag.
fn resolve_attack(cfg: &BenchmarkConfig, level: Option<&str>) -> Result<AttackSpec> {
    let level = match level {
        None => IntensityLevel::Nominal,
        Some(name) => IntensityLevel::from_name(name).ok_or_else(|| {
            config_err(anyhow!("unknown level {name:?} (nominal, low, medium, high)"))
        })?,
    };
    match cfg.attack {
        None => {
            if level != IntensityLevel::Nominal {
                return Err(config_err(anyhow!(
                    "--level {} needs an attack family (--attack noise|latency|crowding)",
                    level.name()
                )));
            }
            Ok(AttackSpec::Nominal)
        }
        Some(family) => schedule_levels(family).level(level).ok_or_else(|| {
            config_err(anyhow!(
                "the {} schedule has no {} level",
                family.name(),
                level.name()
            ))
        }),
    }
}

fn cmd_run(common: CommonArgs, filter: String, seed: u64, level: Option<String>) -> Result<()> {
    let cfg = load_config(&common)?;
    let filter = parse_filter_name(&filter).map_err(config_err)?;
    let attack = resolve_attack(&cfg, level.as_deref())?;
    let cell = RunCell { filter, attack, seed };
    let dir = cell.dir(&cfg.out_dir);
    if dir.join("data.npz").exists() && !common.overwrite {
        return Err(config_err(anyhow!(
            "{} already exists; pass --overwrite to replace it",
            dir.join("data.npz").display()
        )));
    }
    let log = execute_cell(&cfg, &cell)?;
    let metrics = persist_run(&dir, &log)?;
    let no_solution = log
        .filter_status_trace
        .iter()
        .filter(|s| **s == FilterStatus::NoSolution)
        .count();
    println!(
        "run {} -> collision_steps {} mean_goal {:.4} final_goal {:.4} min_env {:.4} no_solution {}",
        dir.display(),
        metrics.collision_steps,
        metrics.mean_goal_distance,
        metrics.final_goal_distance,
        metrics.min_env_distance_overall,
        no_solution,
    );
    Ok(())
}

fn cmd_sweep(common: CommonArgs, jobs: Option<usize>, dump_config: bool) -> Result<()> {
    let mut cfg = load_config(&common)?;
    if let Some(jobs) = jobs {
        cfg.jobs = jobs;
    }
    if dump_config {
        print!("{}", render_config(&cfg));
        return Ok(());
    }
    let outcome = run_sweep(&cfg, common.overwrite)?;
    println!(
        "sweep {}: {} runs ok, {} failed",
        cfg.out_dir.display(),
        outcome.metrics.len(),
        outcome.failures.len()
    );
    if !outcome.failures.is_empty() {
        eprintln!("failures recorded in {}", cfg.out_dir.join("failures.json").display());
    }
    if outcome.metrics.is_empty() {
        bail!("every run in the sweep failed");
    }
    Ok(())
}

fn cmd_parse(paths: Vec<PathBuf>, out: PathBuf) -> Result<()> {
    if paths.is_empty() {
        return Err(config_err(anyhow!("parse needs at least one archive or directory")));
    }
    let outcome = run_parse(&paths, &out)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "parsed {} archives ({} failed) -> {}",
        outcome.metrics.len(),
        outcome.failures.len(),
        out.join("parsed_metrics.csv").display()
    );
    if outcome.metrics.is_empty() {
        bail!("no archive could be parsed");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version output is a normal exit.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Run { common, filter, seed, level } => cmd_run(common, filter, seed, level),
        Command::Sweep { common, jobs, dump_config } => cmd_sweep(common, jobs, dump_config),
        Command::Parse { paths, out } => cmd_parse(paths, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<ConfigError>()) || e.is::<ConfigError>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
