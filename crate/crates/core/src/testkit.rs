//! Independent reference implementations used by the test suites.
//!
//! Everything here deliberately avoids the production code paths it is
//! used to check: the QP oracle enumerates active sets instead of
//! iterating, the statistics helpers use compensated / two-pass formulas,
//! and the scan helpers use explicit index loops. Production code must not
//! call into this module.

use crate::attack::AttackSpec;
use crate::filters::qp::LinearConstraint;
use crate::filters::{FilterKind, FilterStatus};
use crate::sim::{EpisodeLog, SimConfig};
use crate::world::{PairwiseInfo, RobotKind};
use rand::Rng;

/// Exact projection-QP reference: enumerate every candidate active set of
/// size <= dof (over the caller's constraints plus the box faces), solve the
/// equality-constrained projection in closed form, and keep the best
/// candidate feasible for the full system. Returns `None` when no candidate
/// is feasible, which certifies an empty feasible region for this problem
/// class (any nonempty polytope admits an optimum supported by at most dof
/// independent constraints).
pub fn qp_oracle(
    u_nom: &[f64],
    constraints: &[LinearConstraint],
    u_max: f64,
) -> Option<Vec<f64>> {
    let n = u_nom.len();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for c in constraints {
        let norm_sq: f64 = c.a.iter().map(|x| x * x).sum();
        if norm_sq <= 1e-30 {
            if c.b > 1e-9 {
                return None;
            }
            continue;
        }
        rows.push((c.a.clone(), c.b));
    }
    for i in 0..n {
        let mut lo = vec![0.0; n];
        lo[i] = 1.0;
        rows.push((lo, -u_max));
        let mut hi = vec![0.0; n];
        hi[i] = -1.0;
        rows.push((hi, -u_max));
    }

    let feasible = |u: &[f64]| -> bool {
        rows.iter().all(|(a, b)| {
            let v: f64 = a.iter().zip(u.iter()).map(|(x, y)| x * y).sum();
            v >= b - 1e-9
        })
    };
    let objective = |u: &[f64]| -> f64 {
        u.iter().zip(u_nom.iter()).map(|(a, b)| (a - b) * (a - b)).sum()
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |u: Vec<f64>| {
        if feasible(&u) {
            let obj = objective(&u);
            if best.as_ref().map_or(true, |(b, _)| obj < *b) {
                best = Some((obj, u));
            }
        }
    };

    consider(u_nom.to_vec());
    let m = rows.len();
    let mut subset = Vec::new();
    enumerate_subsets(m, n.min(m), &mut subset, &mut |s| {
        if let Some(u) = equality_projection(u_nom, &rows, s) {
            consider(u);
        }
    });
    best.map(|(_, u)| u)
}

fn enumerate_subsets(
    m: usize,
    max_size: usize,
    current: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    fn rec(
        start: usize,
        m: usize,
        max_size: usize,
        current: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if !current.is_empty() {
            visit(current);
        }
        if current.len() == max_size {
            return;
        }
        for k in start..m {
            current.push(k);
            rec(k + 1, m, max_size, current, visit);
            current.pop();
        }
    }
    rec(0, m, max_size, current, visit);
}

/// Minimum-norm correction of u_nom onto the affine set {a_k . u = b_k}.
/// Returns `None` when the selected normals are linearly dependent.
fn equality_projection(
    u_nom: &[f64],
    rows: &[(Vec<f64>, f64)],
    subset: &[usize],
) -> Option<Vec<f64>> {
    let n = u_nom.len();
    let m = subset.len();
    // Gram matrix and residual b - N u_nom.
    let mut g = vec![vec![0.0; m]; m];
    let mut r = vec![0.0; m];
    for (i, &ki) in subset.iter().enumerate() {
        let (ai, bi) = &rows[ki];
        r[i] = bi - ai.iter().zip(u_nom.iter()).map(|(x, y)| x * y).sum::<f64>();
        for (j, &kj) in subset.iter().enumerate() {
            g[i][j] = rows[ki]
                .0
                .iter()
                .zip(rows[kj].0.iter())
                .map(|(x, y)| x * y)
                .sum();
        }
    }
    let lam = solve_checked(&mut g, &mut r)?;
    let mut u = u_nom.to_vec();
    for (i, &ki) in subset.iter().enumerate() {
        for (uk, ak) in u.iter_mut().zip(rows[ki].0.iter()).take(n) {
            *uk += lam[i] * ak;
        }
    }
    Some(u)
}

/// Gaussian elimination that reports singular systems instead of limping on.
fn solve_checked(g: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let scale = g
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(1e-30);
    for col in 0..m {
        let mut piv = col;
        for row in (col + 1)..m {
            if g[row][col].abs() > g[piv][col].abs() {
                piv = row;
            }
        }
        if g[piv][col].abs() < 1e-10 * scale {
            return None;
        }
        g.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..m {
            let f = g[row][col] / g[col][col];
            for k in col..m {
                g[row][k] -= f * g[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for col in (0..m).rev() {
        let mut s = b[col];
        for k in (col + 1)..m {
            s -= g[col][k] * x[k];
        }
        x[col] = s / g[col][col];
    }
    Some(x)
}

/// Random pairwise snapshot with unit-norm gradients, spanning clearances
/// from overlapping to comfortably clear.
pub fn random_pairwise_info<R: Rng>(rng: &mut R, volumes: usize, obstacles: usize) -> PairwiseInfo {
    let dof = 3;
    let pairs = volumes * obstacles;
    let d: Vec<f64> = (0..pairs).map(|_| rng.gen_range(-0.1..0.6)).collect();
    let mut grad = Vec::with_capacity(pairs * dof);
    for _ in 0..pairs {
        let mut g = [0.0f64; 3];
        loop {
            for x in g.iter_mut() {
                *x = rng.gen_range(-1.0..1.0);
            }
            let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
            if norm > 1e-3 {
                for x in g.iter_mut() {
                    *x /= norm;
                }
                break;
            }
        }
        grad.extend_from_slice(&g);
    }
    PairwiseInfo { t: 0, volumes, obstacles, dof, d, grad }
}

/// Random but shape-consistent episode log for serialization and metric
/// round trips. Not the output of a simulation; just a structurally valid
/// record.
pub fn random_episode_log<R: Rng>(rng: &mut R) -> EpisodeLog {
    let steps = rng.gen_range(1..40usize);
    let dof = 3;
    let volumes = rng.gen_range(1..4usize);
    let obstacles = rng.gen_range(0..5usize);
    let self_pairs = rng.gen_range(0..3usize);
    let robot = if rng.gen_bool(0.5) { RobotKind::RigidCluster } else { RobotKind::PlanarArm };
    let filter = FilterKind::ALL[rng.gen_range(0..FilterKind::ALL.len())];
    let attack = match rng.gen_range(0..4) {
        0 => AttackSpec::Nominal,
        1 => AttackSpec::Noise { sigma: rng.gen_range(0.01..0.2) },
        2 => AttackSpec::Latency { delay: rng.gen_range(1..12) },
        _ => AttackSpec::Crowding { n_obstacles: rng.gen_range(1..31) },
    };
    let config = SimConfig {
        dt: rng.gen_range(0.001..0.1),
        steps,
        seed: rng.gen(),
        u_max: rng.gen_range(0.1..2.0),
        k_p: rng.gen_range(0.1..5.0),
        goal: [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
    };
    let statuses = [FilterStatus::Inactive, FilterStatus::Active, FilterStatus::NoSolution];
    EpisodeLog {
        robot,
        filter,
        attack,
        config,
        dof,
        volumes,
        obstacles,
        self_pairs,
        dist_robot_to_env: (0..steps * volumes * obstacles)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect(),
        dist_goal_arm: (0..steps).map(|_| rng.gen_range(0.0..3.0)).collect(),
        q_trace: (0..steps * dof).map(|_| rng.gen_range(-3.0..3.0)).collect(),
        u_nominal_trace: (0..steps * dof).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        u_safe_trace: (0..steps * dof).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        filter_status_trace: (0..steps).map(|_| statuses[rng.gen_range(0..3)]).collect(),
        self_dist_trace: (0..steps * self_pairs).map(|_| rng.gen_range(-0.5..1.0)).collect(),
    }
}

/// Kahan-compensated mean.
pub fn compensated_mean(values: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for &v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum / values.len() as f64
}

/// Two-pass sample standard deviation (n-1 denominator; 0 when n <= 1).
pub fn two_pass_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n <= 1 {
        return 0.0;
    }
    let mean = compensated_mean(values);
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}
