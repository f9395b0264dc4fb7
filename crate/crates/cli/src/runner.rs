//! Experiment-matrix execution: single runs, the (filter x level x seed)
//! sweep on a worker pool, and log re-parsing.

use crate::config::BenchmarkConfig;
use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use safebench::attack::{level_label, schedule_levels, AttackSpec};
use safebench::filters::FilterKind;
use safebench::metrics::{aggregate_seeds, summarize_run, RunMetrics};
use safebench::sim::{run_episode, EpisodeLog, FilterSpec};
use safebench::store::{export_reports, read_npz, write_npz};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// One cell of the experiment matrix.
#[derive(Debug, Clone)]
pub struct RunCell {
    pub filter: FilterKind,
    pub attack: AttackSpec,
    pub seed: u64,
}

impl RunCell {
    pub fn dir(&self, root: &Path) -> PathBuf {
        root.join(self.filter.name())
            .join(level_label(&self.attack))
            .join(self.seed.to_string())
    }
}

/// Execute one episode for a matrix cell.
pub fn execute_cell(config: &BenchmarkConfig, cell: &RunCell) -> Result<EpisodeLog> {
    let model = config.model();
    let sim = config.sim_config(cell.seed, &cell.attack);
    let obstacles = config
        .scene_spec()
        .resolve(cell.seed, &cell.attack)
        .with_context(|| format!("building the scene for seed {}", cell.seed))?;
    run_episode(&model, &obstacles, &sim, &FilterSpec {
        kind: cell.filter,
        params: config.filter_params(),
    }, &cell.attack)
    .map_err(|e| anyhow!(e))
}

/// Write one run's artifacts (data.npz + metrics.json) into its directory.
pub fn persist_run(dir: &Path, log: &EpisodeLog) -> Result<RunMetrics> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_npz(log, &dir.join("data.npz"))?;
    let metrics = summarize_run(log)?;
    let mut json = serde_json::to_string_pretty(&metrics)?;
    json.push('\n');
    std::fs::write(dir.join("metrics.json"), json)?;
    Ok(metrics)
}

/// The full (filter x level x seed) matrix of a config.
pub fn matrix(config: &BenchmarkConfig) -> Vec<RunCell> {
    let attacks: Vec<AttackSpec> = match config.attack {
        None => vec![AttackSpec::Nominal],
        Some(family) => schedule_levels(family)
            .levels
            .into_iter()
            .filter(|(level, _)| config.levels.is_empty() || config.levels.contains(level))
            .map(|(_, spec)| spec)
            .collect(),
    };
    let mut cells = Vec::new();
    for &filter in &config.filters {
        for &attack in &attacks {
            for &seed in &config.seeds {
                cells.push(RunCell { filter, attack, seed });
            }
        }
    }
    cells
}

#[derive(Debug, Serialize)]
pub struct RunFailure {
    pub filter: String,
    pub level: String,
    pub seed: u64,
    pub error: String,
}

pub struct SweepOutcome {
    pub metrics: Vec<RunMetrics>,
    pub failures: Vec<RunFailure>,
}

/// Run the whole matrix on a worker pool and emit the reports.
pub fn run_sweep(config: &BenchmarkConfig, overwrite: bool) -> Result<SweepOutcome> {
    let cells = matrix(config);
    let root = &config.out_dir;
    std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .context("building the worker pool")?;

    let results: Vec<std::result::Result<RunMetrics, RunFailure>> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let dir = cell.dir(root);
                let fail = |error: String| RunFailure {
                    filter: cell.filter.name().to_string(),
                    level: level_label(&cell.attack),
                    seed: cell.seed,
                    error,
                };
                if dir.join("data.npz").exists() && !overwrite {
                    return Err(fail(format!(
                        "{} already exists (pass --overwrite to replace it)",
                        dir.join("data.npz").display()
                    )));
                }
                let log = execute_cell(config, cell).map_err(|e| fail(format!("{e:#}")))?;
                persist_run(&dir, &log).map_err(|e| fail(format!("{e:#}")))
            })
            .collect()
    });

    let mut metrics = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(m) => metrics.push(m),
            Err(f) => failures.push(f),
        }
    }
    failures.sort_by(|a, b| {
        (&a.filter, &a.level, a.seed).cmp(&(&b.filter, &b.level, b.seed))
    });

    if !metrics.is_empty() {
        let summary = aggregate_seeds(&metrics)?;
        export_reports(&metrics, &summary, root)?;
    }
    if !failures.is_empty() {
        let mut json = serde_json::to_string_pretty(&failures)?;
        json.push('\n');
        std::fs::write(root.join("failures.json"), json)?;
    }
    Ok(SweepOutcome { metrics, failures })
}

/// Collect `.npz` archives under each path (files taken as-is, directories
/// walked recursively), sorted for deterministic output.
pub fn collect_archives(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    fn walk(dir: &Path, found: &mut Vec<PathBuf>) -> Result<()> {
        for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
            let path = entry?.path();
            if path.is_dir() {
                walk(&path, found)?;
            } else if path.extension().is_some_and(|e| e == "npz") {
                found.push(path);
            }
        }
        Ok(())
    }
    let mut found = Vec::new();
    for p in paths {
        if p.is_dir() {
            walk(p, &mut found)?;
        } else if p.exists() {
            found.push(p.clone());
        } else {
            bail!("{} does not exist", p.display());
        }
    }
    found.sort();
    Ok(found)
}

#[derive(Debug, Serialize)]
pub struct ParseFailure {
    pub path: String,
    pub error: String,
}

pub struct ParseOutcome {
    pub metrics: Vec<RunMetrics>,
    pub failures: Vec<ParseFailure>,
    pub warnings: Vec<String>,
}

/// Recompute metrics from archives alone (no simulation) and emit reports
/// into `out_dir`.
pub fn run_parse(paths: &[PathBuf], out_dir: &Path) -> Result<ParseOutcome> {
    let archives = collect_archives(paths)?;
    if archives.is_empty() {
        bail!("no .npz archives found under the given paths");
    }
    let mut metrics = Vec::new();
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    for path in &archives {
        let record = |e: String, failures: &mut Vec<ParseFailure>| {
            failures.push(ParseFailure { path: path.display().to_string(), error: e });
        };
        match read_npz(path) {
            Ok(loaded) => {
                for w in &loaded.warnings {
                    warnings.push(format!("{}: {w}", path.display()));
                }
                match summarize_run(&loaded.log) {
                    Ok(m) => metrics.push(m),
                    Err(e) => record(format!("{e}"), &mut failures),
                }
            }
            Err(e) => record(format!("{e}"), &mut failures),
        }
    }

    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    if !metrics.is_empty() {
        let summary = aggregate_seeds(&metrics)?;
        export_reports(&metrics, &summary, out_dir)?;
    }
    if !failures.is_empty() {
        let mut json = serde_json::to_string_pretty(&failures)?;
        json.push('\n');
        std::fs::write(out_dir.join("parse_failures.json"), json)?;
    }
    Ok(ParseOutcome { metrics, failures, warnings })
}
