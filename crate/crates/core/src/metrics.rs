//! Per-run metrics and multi-seed aggregation.
//!
//! A run reduces to: the environment-collision step count (steps whose
//! minimum clearance is strictly negative), the mean and final arm-goal
//! distance, the overall minimum environment clearance, and the count of
//! infeasible-filter steps. Runs group by (filter, attack level) and
//! aggregate to mean and sample standard deviation across seeds.

use crate::attack::{level_label, AttackSpec};
use crate::filters::{FilterKind, FilterStatus};
use crate::sim::EpisodeLog;
use crate::world::RobotKind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("malformed log: {0}")]
    MalformedLog(String),
    #[error("empty trace")]
    EmptyTrace,
    #[error("empty aggregation group")]
    EmptyGroup,
}

/// Identity of one run within the experiment matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunIdentity {
    pub filter: FilterKind,
    pub attack: AttackSpec,
    pub seed: u64,
    pub robot: RobotKind,
    pub steps: usize,
}

/// Summary metrics of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub identity: RunIdentity,
    pub collision_steps: usize,
    pub mean_goal_distance: f64,
    pub final_goal_distance: f64,
    pub min_env_distance_overall: f64,
    pub no_solution_steps: usize,
}

/// Minimum clearance per step: element t is the minimum of the step-t
/// pairwise block. Errors when blocks are empty or the trace length does
/// not divide evenly.
pub fn min_env_trace(log: &EpisodeLog) -> Result<Vec<f64>, MetricsError> {
    let block = log.volumes * log.obstacles;
    if block == 0 {
        return Err(MetricsError::MalformedLog(
            "per-step pairwise block is empty (no volumes or no obstacles)".into(),
        ));
    }
    if log.dist_robot_to_env.len() != block * log.steps() {
        return Err(MetricsError::MalformedLog(format!(
            "dist_robot_to_env has {} entries, expected {} x {}",
            log.dist_robot_to_env.len(),
            log.steps(),
            block
        )));
    }
    Ok(log
        .dist_robot_to_env
        .chunks_exact(block)
        .map(|chunk| chunk.iter().copied().fold(f64::INFINITY, f64::min))
        .collect())
}

/// Count of steps whose clearance is strictly negative. A step exactly at
/// zero (touching) does not count, and neither does -0.0.
pub fn collision_steps(trace: &[f64]) -> usize {
    trace.iter().filter(|&&d| d < 0.0).count()
}

/// Arithmetic mean of the goal-distance trace.
pub fn mean_goal_distance(trace: &[f64]) -> Result<f64, MetricsError> {
    if trace.is_empty() {
        return Err(MetricsError::EmptyTrace);
    }
    Ok(trace.iter().sum::<f64>() / trace.len() as f64)
}

/// Assemble the full metric set of one episode.
pub fn summarize_run(log: &EpisodeLog) -> Result<RunMetrics, MetricsError> {
    log.validate_shape().map_err(MetricsError::MalformedLog)?;
    let trace = min_env_trace(log)?;
    let min_env = trace.iter().copied().fold(f64::INFINITY, f64::min);
    let no_solution = log
        .filter_status_trace
        .iter()
        .filter(|s| **s == FilterStatus::NoSolution)
        .count();
    Ok(RunMetrics {
        identity: RunIdentity {
            filter: log.filter,
            attack: log.attack,
            seed: log.config.seed,
            robot: log.robot,
            steps: log.config.steps,
        },
        collision_steps: collision_steps(&trace),
        mean_goal_distance: mean_goal_distance(&log.dist_goal_arm)?,
        final_goal_distance: *log.dist_goal_arm.last().ok_or(MetricsError::EmptyTrace)?,
        min_env_distance_overall: min_env,
        no_solution_steps: no_solution,
    })
}

/// Mean and sample standard deviation of one metric across seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStat {
    pub mean: f64,
    pub std: f64,
}

fn metric_stat(values: &[f64]) -> MetricStat {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n <= 1 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    MetricStat { mean, std }
}

/// Aggregated metrics for one (filter, attack-level) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub filter: String,
    pub attack: String,
    pub level: String,
    pub seeds: Vec<u64>,
    pub collision_steps: MetricStat,
    pub mean_goal_distance: MetricStat,
    pub final_goal_distance: MetricStat,
    pub min_env_distance: MetricStat,
    pub no_solution_steps: MetricStat,
}

/// All groups of a sweep, canonically ordered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub groups: Vec<GroupSummary>,
}

/// Canonical sort key of one run: filter name, attack family, magnitude,
/// seed. Report emission and aggregation both use it, so output order never
/// depends on scheduling.
pub fn run_sort_key(m: &RunMetrics) -> (String, String, f64, u64) {
    (
        m.identity.filter.name().to_string(),
        m.identity.attack.family_name().to_string(),
        m.identity.attack.magnitude(),
        m.identity.seed,
    )
}

/// Group runs by (filter, attack level) and aggregate each metric to mean
/// and sample std (n-1; a single run gets std 0).
pub fn aggregate_seeds(runs: &[RunMetrics]) -> Result<AggregateSummary, MetricsError> {
    if runs.is_empty() {
        return Err(MetricsError::EmptyGroup);
    }
    let mut sorted: Vec<&RunMetrics> = runs.iter().collect();
    sorted.sort_by(|a, b| {
        run_sort_key(a)
            .partial_cmp(&run_sort_key(b))
            .expect("sort keys are finite")
    });

    let mut groups: Vec<GroupSummary> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let head = sorted[i];
        let key = (head.identity.filter, head.identity.attack);
        let mut members: Vec<&RunMetrics> = Vec::new();
        while i < sorted.len()
            && (sorted[i].identity.filter, sorted[i].identity.attack) == key
        {
            members.push(sorted[i]);
            i += 1;
        }
        let collect = |f: &dyn Fn(&RunMetrics) -> f64| -> Vec<f64> {
            members.iter().map(|m| f(m)).collect()
        };
        groups.push(GroupSummary {
            filter: head.identity.filter.name().to_string(),
            attack: head.identity.attack.family_name().to_string(),
            level: level_label(&head.identity.attack),
            seeds: members.iter().map(|m| m.identity.seed).collect(),
            collision_steps: metric_stat(&collect(&|m| m.collision_steps as f64)),
            mean_goal_distance: metric_stat(&collect(&|m| m.mean_goal_distance)),
            final_goal_distance: metric_stat(&collect(&|m| m.final_goal_distance)),
            min_env_distance: metric_stat(&collect(&|m| m.min_env_distance_overall)),
            no_solution_steps: metric_stat(&collect(&|m| m.no_solution_steps as f64)),
        });
    }
    Ok(AggregateSummary { groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SimConfig;
    use crate::testkit::{compensated_mean, two_pass_std};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn synthetic_log(
        steps: usize,
        volumes: usize,
        obstacles: usize,
        rng: &mut ChaCha8Rng,
    ) -> EpisodeLog {
        let dof = 3;
        EpisodeLog {
            robot: RobotKind::RigidCluster,
            filter: FilterKind::Cbf,
            attack: AttackSpec::Nominal,
            config: SimConfig { steps, ..Default::default() },
            dof,
            volumes,
            obstacles,
            self_pairs: 0,
            dist_robot_to_env: (0..steps * volumes * obstacles)
                .map(|_| rng.gen_range(-0.5..1.5))
                .collect(),
            dist_goal_arm: (0..steps).map(|_| rng.gen_range(0.0..2.0)).collect(),
            q_trace: vec![0.0; steps * dof],
            u_nominal_trace: vec![0.0; steps * dof],
            u_safe_trace: vec![0.0; steps * dof],
            filter_status_trace: (0..steps)
                .map(|_| match rng.gen_range(0..3) {
                    0 => FilterStatus::Inactive,
                    1 => FilterStatus::Active,
                    _ => FilterStatus::NoSolution,
                })
                .collect(),
            self_dist_trace: vec![],
        }
    }

    #[test]
    fn single_pair_trace_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let log = synthetic_log(20, 1, 1, &mut rng);
        assert_eq!(min_env_trace(&log).unwrap(), log.dist_robot_to_env);
    }

    #[test]
    fn dominated_pair_wins_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut log = synthetic_log(50, 3, 4, &mut rng);
        // Pair (2, 3) gets pushed far below everything else at every step.
        let block = 12;
        for t in 0..50 {
            log.dist_robot_to_env[t * block + 2 * 4 + 3] = -10.0 - t as f64;
        }
        let trace = min_env_trace(&log).unwrap();
        for (t, v) in trace.iter().enumerate() {
            assert_eq!(*v, -10.0 - t as f64);
        }
    }

    #[test]
    fn min_trace_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let v = rng.gen_range(1..4usize);
            let o = rng.gen_range(1..5usize);
            let t = rng.gen_range(1..40usize);
            let log = synthetic_log(t, v, o, &mut rng);
            let trace = min_env_trace(&log).unwrap();
            for step in 0..t {
                let mut best = f64::INFINITY;
                for i in 0..v {
                    for j in 0..o {
                        let x = log.dist_robot_to_env[step * v * o + i * o + j];
                        if x < best {
                            best = x;
                        }
                    }
                }
                assert_eq!(trace[step], best);
            }
        }
    }

    #[test]
    fn min_trace_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let log = synthetic_log(30, 2, 3, &mut rng);
        let trace = min_env_trace(&log).unwrap();
        let mut shuffled = log.clone();
        // Reverse each step block: a permutation of the pair order.
        for chunk in shuffled.dist_robot_to_env.chunks_exact_mut(6) {
            chunk.reverse();
        }
        assert_eq!(min_env_trace(&shuffled).unwrap(), trace);
    }

    #[test]
    fn collision_steps_cases() {
        assert_eq!(collision_steps(&[0.1, -0.02, -0.01, 0.3]), 2);
        assert_eq!(collision_steps(&[0.5, 0.2, 0.1]), 0);
        assert_eq!(collision_steps(&[0.0, -0.0]), 0);
    }

    #[test]
    fn mean_goal_distance_cases() {
        assert_eq!(mean_goal_distance(&[0.5, 0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(mean_goal_distance(&[0.0, 1.0]).unwrap(), 0.5);
        assert!(matches!(mean_goal_distance(&[]), Err(MetricsError::EmptyTrace)));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let values: Vec<f64> = (0..10_000).map(|_| rng.gen_range(0.0..3.0)).collect();
        let got = mean_goal_distance(&values).unwrap();
        let want = compensated_mean(&values);
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
    }

    #[test]
    fn goal_scaling_scales_the_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let values: Vec<f64> = (0..500).map(|_| rng.gen_range(0.0..2.0)).collect();
        let c = 3.5;
        let scaled: Vec<f64> = values.iter().map(|v| c * v).collect();
        let a = mean_goal_distance(&values).unwrap();
        let b = mean_goal_distance(&scaled).unwrap();
        assert!((b - c * a).abs() < 1e-12);
    }

    #[test]
    fn summarize_counts_negative_steps_and_no_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut log = synthetic_log(40, 2, 2, &mut rng);
        // Force all blocks positive, then drive exactly 7 steps negative.
        for x in log.dist_robot_to_env.iter_mut() {
            *x = x.abs() + 0.01;
        }
        for t in 5..12 {
            log.dist_robot_to_env[t * 4] = -0.02;
        }
        let m = summarize_run(&log).unwrap();
        assert_eq!(m.collision_steps, 7);
        assert!(m.min_env_distance_overall < 0.0);
        let expected_nosol = log
            .filter_status_trace
            .iter()
            .filter(|s| **s == FilterStatus::NoSolution)
            .count();
        assert_eq!(m.no_solution_steps, expected_nosol);
        assert_eq!(m.final_goal_distance, *log.dist_goal_arm.last().unwrap());

        // Eq. pipeline composition: counting on the reduced trace equals
        // counting through summarize_run.
        let trace = min_env_trace(&log).unwrap();
        assert_eq!(collision_steps(&trace), m.collision_steps);
    }

    #[test]
    fn collision_free_run_summary() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut log = synthetic_log(25, 2, 2, &mut rng);
        for x in log.dist_robot_to_env.iter_mut() {
            *x = x.abs() + 0.05;
        }
        let m = summarize_run(&log).unwrap();
        assert_eq!(m.collision_steps, 0);
        assert!(m.min_env_distance_overall > 0.0);
    }

    #[test]
    fn table_shape_reference() {
        // Schema check: a collision-free log with a constant goal distance
        // of 0.046 reports the pair (0, 0.046).
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut log = synthetic_log(100, 2, 2, &mut rng);
        for x in log.dist_robot_to_env.iter_mut() {
            *x = x.abs() + 0.01;
        }
        for x in log.dist_goal_arm.iter_mut() {
            *x = 0.046;
        }
        let m = summarize_run(&log).unwrap();
        assert_eq!(m.collision_steps, 0);
        assert!((m.mean_goal_distance - 0.046).abs() < 1e-15);
    }

    #[test]
    fn aggregation_single_run_and_textbook_std() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let log = synthetic_log(10, 1, 1, &mut rng);
        let m = summarize_run(&log).unwrap();
        let agg = aggregate_seeds(std::slice::from_ref(&m)).unwrap();
        assert_eq!(agg.groups.len(), 1);
        assert_eq!(agg.groups[0].collision_steps.std, 0.0);
        assert_eq!(agg.groups[0].collision_steps.mean, m.collision_steps as f64);

        // {1, 2, 3} -> mean 2, std 1.
        let stat = metric_stat(&[1.0, 2.0, 3.0]);
        assert_eq!(stat.mean, 2.0);
        assert!((stat.std - 1.0).abs() < 1e-15);
    }

    #[test]
    fn aggregation_matches_two_pass_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(1..8usize);
            let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let stat = metric_stat(&vals);
            assert!((stat.mean - compensated_mean(&vals)).abs() < 1e-12);
            assert!((stat.std - two_pass_std(&vals)).abs() < 1e-12);
        }
    }

    #[test]
    fn aggregation_groups_by_filter_and_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut runs = Vec::new();
        for filter in [FilterKind::Cbf, FilterKind::Pfm] {
            for sigma in [0.0, 0.05] {
                for seed in [20, 21, 22] {
                    let mut log = synthetic_log(10, 1, 1, &mut rng);
                    log.filter = filter;
                    log.attack = AttackSpec::Noise { sigma }.canonical();
                    log.config.seed = seed;
                    runs.push(summarize_run(&log).unwrap());
                }
            }
        }
        let agg = aggregate_seeds(&runs).unwrap();
        assert_eq!(agg.groups.len(), 4);
        for g in &agg.groups {
            assert_eq!(g.seeds, vec![20, 21, 22]);
        }
        assert!(matches!(aggregate_seeds(&[]), Err(MetricsError::EmptyGroup)));
    }

    #[test]
    fn metrics_are_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let log = synthetic_log(30, 2, 3, &mut rng);
        let a = summarize_run(&log).unwrap();
        let b = summarize_run(&log).unwrap();
        assert_eq!(a, b);
    }
}
