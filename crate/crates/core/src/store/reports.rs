//! Report emission: `parsed_metrics.csv` (one row per run),
//! `summary.json` (per-group mean/std), and `plot_data.csv` (long-format
//! table for external plotting). All outputs are canonically sorted so
//! identical inputs produce identical bytes regardless of insertion order.

use super::npz::StoreError;
use crate::attack::level_label;
use crate::metrics::{run_sort_key, AggregateSummary, RunMetrics};
use std::path::Path;

/// CSV header of `parsed_metrics.csv`.
pub const METRICS_CSV_HEADER: &str = "filter,attack,level,seed,steps,collision_steps,\
mean_goal_distance,final_goal_distance,min_env_distance,no_solution_steps";

/// Format a float with 6 significant digits, printf-%g style: plain decimal
/// inside a reasonable exponent range, scientific outside it, trailing
/// zeros trimmed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(s)
    } else {
        let s = format!("{x:.5e}");
        // Rust renders 1.23e5; trim zeros in the mantissa only.
        match s.split_once('e') {
            Some((mantissa, exponent)) => {
                format!("{}e{}", trim_zeros(mantissa.to_string()), exponent)
            }
            None => s,
        }
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let s = s.trim_end_matches('0');
    s.strip_suffix('.').unwrap_or(s).to_string()
}

/// Render the per-run metrics CSV (header plus one sorted row per run).
pub fn render_metrics_csv(metrics: &[RunMetrics]) -> String {
    let mut sorted: Vec<&RunMetrics> = metrics.iter().collect();
    sorted.sort_by(|a, b| run_sort_key(a).partial_cmp(&run_sort_key(b)).unwrap());
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for m in sorted {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            m.identity.filter.name(),
            m.identity.attack.family_name(),
            level_label(&m.identity.attack),
            m.identity.seed,
            m.identity.steps,
            m.collision_steps,
            format_sig6(m.mean_goal_distance),
            format_sig6(m.final_goal_distance),
            format_sig6(m.min_env_distance_overall),
            m.no_solution_steps,
        ));
    }
    out
}

/// Render the long-format plot table: one (level, filter, metric, value)
/// row per aggregated statistic.
pub fn render_plot_csv(summary: &AggregateSummary) -> String {
    let mut out = String::from("level,filter,metric,value\n");
    for g in &summary.groups {
        let stats = [
            ("collision_steps_mean", g.collision_steps.mean),
            ("collision_steps_std", g.collision_steps.std),
            ("mean_goal_distance_mean", g.mean_goal_distance.mean),
            ("mean_goal_distance_std", g.mean_goal_distance.std),
            ("final_goal_distance_mean", g.final_goal_distance.mean),
            ("final_goal_distance_std", g.final_goal_distance.std),
            ("min_env_distance_mean", g.min_env_distance.mean),
            ("min_env_distance_std", g.min_env_distance.std),
            ("no_solution_steps_mean", g.no_solution_steps.mean),
            ("no_solution_steps_std", g.no_solution_steps.std),
        ];
        for (metric, value) in stats {
            out.push_str(&format!("{},{},{},{}\n", g.level, g.filter, metric, format_sig6(value)));
        }
    }
    out
}

/// Render `summary.json` (pretty-printed, trailing newline).
pub fn render_summary_json(summary: &AggregateSummary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Write `parsed_metrics.csv`, `summary.json`, and `plot_data.csv` into
/// `out_dir`.
pub fn export_reports(
    metrics: &[RunMetrics],
    summary: &AggregateSummary,
    out_dir: &Path,
) -> Result<(), StoreError> {
    let write = |name: &str, content: String| -> Result<(), StoreError> {
        let path = out_dir.join(name);
        std::fs::write(&path, content).map_err(|source| StoreError::Io { path, source })
    };
    write("parsed_metrics.csv", render_metrics_csv(metrics))?;
    write("summary.json", render_summary_json(summary))?;
    write("plot_data.csv", render_plot_csv(summary))?;
    Ok(())
}
