//! Perception-level attack channel and scene crowding.
//!
//! Attacks corrupt only the [`PairwiseInfo`] handed to the safety filter;
//! the simulated world itself is never touched. Noise adds iid Gaussian
//! perturbations to the perceived clearances (gradients stay intact),
//! latency replays stale snapshots through a ring buffer, and crowding
//! changes the obstacle count of the generated scene instead of the
//! perception path.

use crate::world::{Obstacle, PairwiseInfo};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

/// Obstacle radius used by generated crowding scenes, in meters.
pub const CROWDING_OBSTACLE_RADIUS: f64 = 0.1;

/// Total rejection-sampling budget for one scene.
pub const SCENE_SAMPLING_BUDGET: usize = 100_000;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error(
        "scene sampling budget exhausted: placed {placed} of {requested} obstacles after \
         {attempts} attempts; tightest constraint is exclusion ball #{ball_index} at \
         ({x:.3}, {y:.3}, {z:.3}) radius {radius:.3}"
    )]
    BudgetExhausted {
        placed: usize,
        requested: usize,
        attempts: usize,
        ball_index: usize,
        x: f64,
        y: f64,
        z: f64,
        radius: f64,
    },
    #[error("workspace box is inverted on axis {axis}: {lo} > {hi}")]
    InvertedBox { axis: usize, lo: f64, hi: f64 },
}

/// One perception attack. `Nominal` leaves perception untouched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AttackSpec {
    Nominal,
    Noise { sigma: f64 },
    Latency { delay: usize },
    Crowding { n_obstacles: usize },
}

impl AttackSpec {
    /// Zero-magnitude attacks are the nominal run; fold them together so
    /// their episodes (including metadata) are bit-identical.
    pub fn canonical(&self) -> AttackSpec {
        match *self {
            AttackSpec::Noise { sigma } if sigma == 0.0 => AttackSpec::Nominal,
            AttackSpec::Latency { delay: 0 } => AttackSpec::Nominal,
            other => other,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            AttackSpec::Nominal => "none",
            AttackSpec::Noise { .. } => "noise",
            AttackSpec::Latency { .. } => "latency",
            AttackSpec::Crowding { .. } => "crowding",
        }
    }

    /// Numeric magnitude of the attack (0 for nominal).
    pub fn magnitude(&self) -> f64 {
        match *self {
            AttackSpec::Nominal => 0.0,
            AttackSpec::Noise { sigma } => sigma,
            AttackSpec::Latency { delay } => delay as f64,
            AttackSpec::Crowding { n_obstacles } => n_obstacles as f64,
        }
    }

    pub fn kind_code(&self) -> i64 {
        match self {
            AttackSpec::Nominal => 0,
            AttackSpec::Noise { .. } => 1,
            AttackSpec::Latency { .. } => 2,
            AttackSpec::Crowding { .. } => 3,
        }
    }

    pub fn from_code(code: i64, param: f64) -> Option<AttackSpec> {
        match code {
            0 => Some(AttackSpec::Nominal),
            1 => Some(AttackSpec::Noise { sigma: param }),
            2 => Some(AttackSpec::Latency { delay: param as usize }),
            3 => Some(AttackSpec::Crowding { n_obstacles: param as usize }),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            AttackSpec::Noise { sigma } => {
                if sigma < 0.0 || !sigma.is_finite() {
                    return Err(format!("noise sigma must be >= 0, got {sigma}"));
                }
            }
            AttackSpec::Crowding { n_obstacles } => {
                if n_obstacles == 0 {
                    return Err("crowding needs at least one obstacle".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Stable 64-bit identity, used to derive per-episode RNG streams.
    pub fn stable_hash(&self) -> u64 {
        let (code, param) = match *self {
            AttackSpec::Nominal => (0u64, 0u64),
            AttackSpec::Noise { sigma } => (1, sigma.to_bits()),
            AttackSpec::Latency { delay } => (2, delay as u64),
            AttackSpec::Crowding { n_obstacles } => (3, n_obstacles as u64),
        };
        mix64(code.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(mix64(param)))
    }
}

/// splitmix64 finalizer; cheap stable mixing for seed derivation.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Attack families that can be swept over intensity levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttackFamily {
    Noise,
    Latency,
    Crowding,
}

impl AttackFamily {
    pub fn name(&self) -> &'static str {
        match self {
            AttackFamily::Noise => "noise",
            AttackFamily::Latency => "latency",
            AttackFamily::Crowding => "crowding",
        }
    }

    pub fn from_name(name: &str) -> Option<AttackFamily> {
        match name {
            "noise" => Some(AttackFamily::Noise),
            "latency" => Some(AttackFamily::Latency),
            "crowding" => Some(AttackFamily::Crowding),
            _ => None,
        }
    }
}

/// Named intensity rungs of a sweep schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntensityLevel {
    Nominal,
    Low,
    Medium,
    High,
}

impl IntensityLevel {
    pub const ALL: [IntensityLevel; 4] = [
        IntensityLevel::Nominal,
        IntensityLevel::Low,
        IntensityLevel::Medium,
        IntensityLevel::High,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IntensityLevel::Nominal => "nominal",
            IntensityLevel::Low => "low",
            IntensityLevel::Medium => "medium",
            IntensityLevel::High => "high",
        }
    }

    pub fn from_name(name: &str) -> Option<IntensityLevel> {
        IntensityLevel::ALL.iter().copied().find(|l| l.name() == name)
    }

    /// Canonical ordering index (nominal first).
    pub fn order(&self) -> usize {
        match self {
            IntensityLevel::Nominal => 0,
            IntensityLevel::Low => 1,
            IntensityLevel::Medium => 2,
            IntensityLevel::High => 3,
        }
    }
}

/// Ordered attack magnitudes for one family.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensitySchedule {
    pub family: AttackFamily,
    pub levels: Vec<(IntensityLevel, AttackSpec)>,
}

impl IntensitySchedule {
    pub fn level(&self, level: IntensityLevel) -> Option<AttackSpec> {
        self.levels.iter().find(|(l, _)| *l == level).map(|(_, s)| *s)
    }
}

/// The fixed sweep schedule for each attack family: noise sigma rises from
/// 0 to 0.10 m, latency from 0 to 10 steps, crowding from 5 to 30 obstacles.
pub fn schedule_levels(family: AttackFamily) -> IntensitySchedule {
    let levels = match family {
        AttackFamily::Noise => vec![
            (IntensityLevel::Nominal, AttackSpec::Noise { sigma: 0.0 }.canonical()),
            (IntensityLevel::Low, AttackSpec::Noise { sigma: 0.02 }),
            (IntensityLevel::Medium, AttackSpec::Noise { sigma: 0.05 }),
            (IntensityLevel::High, AttackSpec::Noise { sigma: 0.10 }),
        ],
        AttackFamily::Latency => vec![
            (IntensityLevel::Nominal, AttackSpec::Latency { delay: 0 }.canonical()),
            (IntensityLevel::Low, AttackSpec::Latency { delay: 2 }),
            (IntensityLevel::Medium, AttackSpec::Latency { delay: 5 }),
            (IntensityLevel::High, AttackSpec::Latency { delay: 10 }),
        ],
        AttackFamily::Crowding => vec![
            (IntensityLevel::Nominal, AttackSpec::Crowding { n_obstacles: 5 }),
            (IntensityLevel::Medium, AttackSpec::Crowding { n_obstacles: 15 }),
            (IntensityLevel::High, AttackSpec::Crowding { n_obstacles: 30 }),
        ],
    };
    IntensitySchedule { family, levels }
}

/// Map an attack back to its schedule level, if it sits on one.
pub fn level_of(spec: &AttackSpec) -> Option<IntensityLevel> {
    let canonical = spec.canonical();
    if canonical == AttackSpec::Nominal {
        return Some(IntensityLevel::Nominal);
    }
    let family = match canonical {
        AttackSpec::Noise { .. } => AttackFamily::Noise,
        AttackSpec::Latency { .. } => AttackFamily::Latency,
        AttackSpec::Crowding { .. } => AttackFamily::Crowding,
        AttackSpec::Nominal => unreachable!(),
    };
    schedule_levels(family)
        .levels
        .iter()
        .find(|(_, s)| *s == canonical)
        .map(|(l, _)| *l)
}

/// Label for reports: the schedule level name when the attack sits on the
/// standard schedule, otherwise its raw magnitude.
pub fn level_label(spec: &AttackSpec) -> String {
    match level_of(spec) {
        Some(level) => level.name().to_string(),
        None => format!("{}", spec.magnitude()),
    }
}

/// One standard normal from two uniform draws (Box-Muller, cosine branch).
///
/// Draw order is fixed: u1 = 1 - next_f64 (so it lies in (0, 1]), then
/// u2 = next_f64. Every noise perturbation consumes exactly two draws.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Add iid Gaussian noise to the perceived clearances, in row-major pair
/// order. Gradients and the underlying world are untouched; sigma = 0
/// returns the input unchanged without consuming the RNG.
pub fn perturb_noise<R: Rng>(info: PairwiseInfo, sigma: f64, rng: &mut R) -> PairwiseInfo {
    if sigma == 0.0 {
        return info;
    }
    let mut out = info;
    for d in out.d.iter_mut() {
        *d += sigma * standard_normal(rng);
    }
    out
}

/// Ring buffer of the last `delay + 1` pairwise snapshots.
#[derive(Debug, Clone)]
pub struct LatencyBuffer {
    delay: usize,
    buf: VecDeque<PairwiseInfo>,
}

impl LatencyBuffer {
    pub fn new(delay: usize) -> Self {
        LatencyBuffer { delay, buf: VecDeque::with_capacity(delay + 1) }
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    /// Push the fresh snapshot and return the one from `delay` steps ago
    /// (the oldest available during warm-up).
    pub fn step(&mut self, fresh: PairwiseInfo) -> PairwiseInfo {
        self.buf.push_back(fresh);
        if self.buf.len() > self.delay + 1 {
            self.buf.pop_front();
        }
        self.buf.front().expect("buffer never empty after push").clone()
    }
}

/// The perception path of one episode: world truth in, perceived info out.
#[derive(Debug, Clone)]
pub enum PerceptionChannel {
    Pass,
    Noise { sigma: f64 },
    Latency { buffer: LatencyBuffer },
}

impl PerceptionChannel {
    /// Crowding alters the scene, not the perception path, so it maps to
    /// the passthrough channel here.
    pub fn for_attack(attack: &AttackSpec) -> PerceptionChannel {
        match attack.canonical() {
            AttackSpec::Nominal | AttackSpec::Crowding { .. } => PerceptionChannel::Pass,
            AttackSpec::Noise { sigma } => PerceptionChannel::Noise { sigma },
            AttackSpec::Latency { delay } => {
                PerceptionChannel::Latency { buffer: LatencyBuffer::new(delay) }
            }
        }
    }

    pub fn perceive<R: Rng>(&mut self, fresh: PairwiseInfo, rng: &mut R) -> PairwiseInfo {
        match self {
            PerceptionChannel::Pass => fresh,
            PerceptionChannel::Noise { sigma } => perturb_noise(fresh, *sigma, rng),
            PerceptionChannel::Latency { buffer } => buffer.step(fresh),
        }
    }
}

/// Axis-aligned sampling box for obstacle centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

/// A spherical keep-out region for obstacle centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionBall {
    pub center: [f64; 3],
    pub radius: f64,
}

impl ExclusionBall {
    fn contains(&self, p: [f64; 3]) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let dz = p[2] - self.center[2];
        dx * dx + dy * dy + dz * dz < self.radius * self.radius
    }
}

/// Sample `n` fixed-radius obstacles uniformly inside the workspace box,
/// rejecting centers that fall inside any exclusion ball. Deterministic
/// per seed; per-attempt draw order is x, y, z.
pub fn generate_crowding_scene(
    n_obstacles: usize,
    seed: u64,
    workspace: &Aabb,
    exclusions: &[ExclusionBall],
) -> Result<Vec<Obstacle>, SceneError> {
    for axis in 0..3 {
        if workspace.min[axis] > workspace.max[axis] {
            return Err(SceneError::InvertedBox {
                axis,
                lo: workspace.min[axis],
                hi: workspace.max[axis],
            });
        }
    }
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ 0x5ce2_ea6e_5c3e_9a01));
    let mut obstacles = Vec::with_capacity(n_obstacles);
    let mut attempts = 0usize;
    let mut rejections = vec![0usize; exclusions.len()];
    while obstacles.len() < n_obstacles {
        if attempts >= SCENE_SAMPLING_BUDGET {
            let worst = rejections
                .iter()
                .enumerate()
                .max_by_key(|(_, &c)| c)
                .map(|(i, _)| i)
                .unwrap_or(0);
            let ball = exclusions.get(worst).copied().unwrap_or(ExclusionBall {
                center: [0.0; 3],
                radius: 0.0,
            });
            return Err(SceneError::BudgetExhausted {
                placed: obstacles.len(),
                requested: n_obstacles,
                attempts,
                ball_index: worst,
                x: ball.center[0],
                y: ball.center[1],
                z: ball.center[2],
                radius: ball.radius,
            });
        }
        attempts += 1;
        let p = [
            rng.gen_range(workspace.min[0]..=workspace.max[0]),
            rng.gen_range(workspace.min[1]..=workspace.max[1]),
            rng.gen_range(workspace.min[2]..=workspace.max[2]),
        ];
        if let Some(idx) = exclusions.iter().position(|b| b.contains(p)) {
            rejections[idx] += 1;
            continue;
        }
        obstacles.push(Obstacle { center: p, radius: CROWDING_OBSTACLE_RADIUS });
    }
    Ok(obstacles)
}
