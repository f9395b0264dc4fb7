//! Deterministic first-order episode loop.
//!
//! Each step computes the true pairwise clearances, routes them through the
//! perception channel (the attack surface), runs the nominal goal-tracking
//! controller and the configured safety filter, logs every signal, and
//! integrates q' = q + dt u. Given the same (model, scene, config, filter,
//! attack), the resulting [`EpisodeLog`] is bit-identical on every run.

use crate::attack::{
    generate_crowding_scene, mix64, Aabb, AttackSpec, ExclusionBall, PerceptionChannel,
    SceneError, CROWDING_OBSTACLE_RADIUS,
};
use crate::filters::{apply_filter, FilterError, FilterKind, FilterParams, FilterStatus};
use crate::world::{
    compute_pairwise_info, forward_kinematics, self_pair_distances, wrap_angle, Obstacle,
    RobotKind, RobotModel, RobotState, WorldError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("control vector has {got} entries, model expects {expected}")]
    ControlDimension { expected: usize, got: usize },
    #[error("control vector contains non-finite entries")]
    NonFiniteControl,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Episode configuration: integration step, horizon, seed, control bound,
/// proportional gain, and the goal point for the tracked arm volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    pub u_max: f64,
    pub k_p: f64,
    pub goal: [f64; 3],
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { dt: 0.01, steps: 5000, seed: 20, u_max: 1.0, k_p: 2.0, goal: [1.0, 0.0, 0.0] }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(SimError::InvalidConfig(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(SimError::InvalidConfig("steps must be >= 1".into()));
        }
        if !(self.u_max > 0.0) || !self.u_max.is_finite() {
            return Err(SimError::InvalidConfig(format!(
                "u_max must be > 0, got {}",
                self.u_max
            )));
        }
        if !(self.k_p > 0.0) || !self.k_p.is_finite() {
            return Err(SimError::InvalidConfig(format!("k_p must be > 0, got {}", self.k_p)));
        }
        if !self.goal.iter().all(|x| x.is_finite()) {
            return Err(SimError::InvalidConfig("goal must be finite".into()));
        }
        Ok(())
    }
}

/// Filter selection plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub params: FilterParams,
}

impl FilterSpec {
    pub fn new(kind: FilterKind) -> Self {
        FilterSpec { kind, params: FilterParams::default() }
    }
}

/// Step-indexed episode record. Every per-step array has exactly
/// `config.steps` entries (blocks thereof for the matrix traces), all
/// indexed by the state at the start of the step.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub robot: RobotKind,
    pub filter: FilterKind,
    pub attack: AttackSpec,
    pub config: SimConfig,
    pub dof: usize,
    pub volumes: usize,
    pub obstacles: usize,
    pub self_pairs: usize,
    /// Flattened per-step clearance matrix: steps x volumes x obstacles.
    pub dist_robot_to_env: Vec<f64>,
    /// Arm-volume-to-goal distance per step.
    pub dist_goal_arm: Vec<f64>,
    /// Configuration per step: steps x dof.
    pub q_trace: Vec<f64>,
    pub u_nominal_trace: Vec<f64>,
    pub u_safe_trace: Vec<f64>,
    pub filter_status_trace: Vec<FilterStatus>,
    /// Self clearances per step: steps x self_pairs (empty for the cluster).
    pub self_dist_trace: Vec<f64>,
}

impl EpisodeLog {
    pub fn steps(&self) -> usize {
        self.config.steps
    }

    /// The clearance block of one step.
    pub fn pair_block(&self, t: usize) -> &[f64] {
        let k = self.volumes * self.obstacles;
        &self.dist_robot_to_env[t * k..(t + 1) * k]
    }

    /// Check the shape invariants of every trace array.
    pub fn validate_shape(&self) -> Result<(), String> {
        let t = self.config.steps;
        let checks = [
            ("dist_robot_to_env", self.dist_robot_to_env.len(), t * self.volumes * self.obstacles),
            ("dist_goal_arm", self.dist_goal_arm.len(), t),
            ("q_trace", self.q_trace.len(), t * self.dof),
            ("u_nominal_trace", self.u_nominal_trace.len(), t * self.dof),
            ("u_safe_trace", self.u_safe_trace.len(), t * self.dof),
            ("filter_status_trace", self.filter_status_trace.len(), t),
            ("self_dist_trace", self.self_dist_trace.len(), t * self.self_pairs),
        ];
        for (name, got, want) in checks {
            if got != want {
                return Err(format!("{name} has {got} entries, expected {want}"));
            }
        }
        Ok(())
    }
}

/// Proportional goal tracking through the arm volume's Jacobian:
/// u = clamp(k_p J_arm^T (goal - c_arm)), componentwise at +-u_max.
pub fn nominal_control(
    model: &RobotModel,
    state: &RobotState,
    config: &SimConfig,
) -> Result<Vec<f64>, SimError> {
    let (centers, jacobians) = forward_kinematics(model, state)?;
    let c = centers[model.arm_volume_index];
    let err = [config.goal[0] - c[0], config.goal[1] - c[1], config.goal[2] - c[2]];
    let mut u = jacobians[model.arm_volume_index].transpose_apply(err);
    for x in u.iter_mut() {
        *x = (config.k_p * *x).clamp(-config.u_max, config.u_max);
    }
    Ok(u)
}

/// Distance from the tracked arm volume's center to the goal.
pub fn goal_distance(
    model: &RobotModel,
    state: &RobotState,
    goal: [f64; 3],
) -> Result<f64, SimError> {
    let (centers, _) = forward_kinematics(model, state)?;
    let c = centers[model.arm_volume_index];
    Ok(((goal[0] - c[0]).powi(2) + (goal[1] - c[1]).powi(2) + (goal[2] - c[2]).powi(2)).sqrt())
}

/// Forward-Euler step q' = q + dt u; planar-arm angles re-wrap to (-pi, pi].
pub fn integrate_step(
    model: &RobotModel,
    state: &RobotState,
    u: &[f64],
    dt: f64,
) -> Result<RobotState, SimError> {
    if u.len() != model.dof {
        return Err(SimError::ControlDimension { expected: model.dof, got: u.len() });
    }
    if !u.iter().all(|x| x.is_finite()) {
        return Err(SimError::NonFiniteControl);
    }
    let mut q: Vec<f64> = state.q.iter().zip(u.iter()).map(|(qk, uk)| qk + dt * uk).collect();
    if model.kind == RobotKind::PlanarArm {
        for a in q.iter_mut() {
            *a = wrap_angle(*a);
        }
    }
    Ok(RobotState { q, t: state.t + 1 })
}

/// Per-episode RNG stream, derived from the seed and the attack identity so
/// distinct attack runs never share draws. No global RNG is involved.
pub fn episode_rng(seed: u64, attack: &AttackSpec) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed) ^ attack.stable_hash())
}

/// Run one episode and record every step.
///
/// The loop per step: true pairwise info -> perception channel -> nominal
/// control -> safety filter -> Euler integration. Filter infeasibility is
/// not an error: the episode brakes (u = 0), logs `NoSolution`, and keeps
/// going.
pub fn run_episode(
    model: &RobotModel,
    obstacles: &[Obstacle],
    config: &SimConfig,
    filter: &FilterSpec,
    attack: &AttackSpec,
) -> Result<EpisodeLog, SimError> {
    model.validate()?;
    config.validate()?;
    filter.params.validate().map_err(SimError::InvalidConfig)?;
    attack.validate().map_err(SimError::InvalidConfig)?;
    if filter.params.u_max != config.u_max {
        return Err(SimError::InvalidConfig(format!(
            "filter u_max {} must inherit the simulation bound {}",
            filter.params.u_max, config.u_max
        )));
    }
    let attack = attack.canonical();

    let steps = config.steps;
    let dof = model.dof;
    let volumes = model.num_volumes();
    let n_obs = obstacles.len();
    let self_pairs = model.self_pairs().len();

    let mut rng = episode_rng(config.seed, &attack);
    let mut channel = PerceptionChannel::for_attack(&attack);
    let mut state = RobotState::origin(dof);

    let mut log = EpisodeLog {
        robot: model.kind,
        filter: filter.kind,
        attack,
        config: config.clone(),
        dof,
        volumes,
        obstacles: n_obs,
        self_pairs,
        dist_robot_to_env: Vec::with_capacity(steps * volumes * n_obs),
        dist_goal_arm: Vec::with_capacity(steps),
        q_trace: Vec::with_capacity(steps * dof),
        u_nominal_trace: Vec::with_capacity(steps * dof),
        u_safe_trace: Vec::with_capacity(steps * dof),
        filter_status_trace: Vec::with_capacity(steps),
        self_dist_trace: Vec::with_capacity(steps * self_pairs),
    };

    for t in 0..steps {
        state.t = t;
        let true_info = compute_pairwise_info(model, &state, obstacles)?;
        log.dist_robot_to_env.extend_from_slice(&true_info.d);
        log.dist_goal_arm.push(goal_distance(model, &state, config.goal)?);
        log.q_trace.extend_from_slice(&state.q);
        log.self_dist_trace
            .extend_from_slice(&self_pair_distances(model, &state)?);

        let perceived = channel.perceive(true_info, &mut rng);
        let u_nom = nominal_control(model, &state, config)?;
        let out = apply_filter(filter.kind, &filter.params, &u_nom, &perceived)?;

        log.u_nominal_trace.extend_from_slice(&u_nom);
        log.u_safe_trace.extend_from_slice(&out.u_safe);
        log.filter_status_trace.push(out.status);

        state = integrate_step(model, &state, &out.u_safe, config.dt)?;
    }

    debug_assert!(log.validate_shape().is_ok());
    Ok(log)
}

/// How the obstacle field of an episode is produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SceneSpec {
    /// A fixed, explicit obstacle list.
    Explicit(Vec<Obstacle>),
    /// Obstacles sampled per seed inside a workspace box, away from the
    /// start pose and the goal.
    Crowding { n_obstacles: usize, workspace: Aabb, exclusions: Vec<ExclusionBall> },
}

/// Workspace box obstacles are sampled from, by robot kind. Both default
/// scenes are planar (z = 0): the cluster robot starts in that plane and
/// its dynamics keep it there, so the obstacle field cannot be flown over.
pub fn default_workspace(kind: RobotKind) -> Aabb {
    match kind {
        RobotKind::RigidCluster => Aabb { min: [-0.45, -0.45, 0.0], max: [1.00, 0.45, 0.0] },
        RobotKind::PlanarArm => Aabb { min: [-0.9, -0.9, 0.0], max: [0.9, 0.9, 0.0] },
    }
}

/// Keep-out balls for scene generation: one per collision volume at the
/// start pose (inflated by the obstacle radius plus a clearance margin)
/// and one around the goal.
pub fn default_exclusions(model: &RobotModel, goal: [f64; 3]) -> Vec<ExclusionBall> {
    let start = RobotState::origin(model.dof);
    let (centers, _) = forward_kinematics(model, &start).expect("origin state is valid");
    let mut balls: Vec<ExclusionBall> = centers
        .iter()
        .zip(model.volumes.iter())
        .map(|(c, v)| ExclusionBall {
            center: *c,
            radius: v.radius + CROWDING_OBSTACLE_RADIUS + 0.02,
        })
        .collect();
    balls.push(ExclusionBall { center: goal, radius: 0.30 });
    balls
}

impl SceneSpec {
    /// The benchmark's default scene: five obstacles sampled per seed.
    pub fn default_crowding(model: &RobotModel, goal: [f64; 3]) -> SceneSpec {
        SceneSpec::Crowding {
            n_obstacles: 5,
            workspace: default_workspace(model.kind),
            exclusions: default_exclusions(model, goal),
        }
    }

    /// Produce the obstacle list for one run. A crowding attack overrides
    /// the generated obstacle count; it cannot apply to an explicit scene.
    pub fn resolve(&self, seed: u64, attack: &AttackSpec) -> Result<Vec<Obstacle>, SimError> {
        match self {
            SceneSpec::Explicit(list) => {
                if matches!(attack, AttackSpec::Crowding { .. }) {
                    return Err(SimError::InvalidConfig(
                        "a crowding attack needs a generated (crowding) scene, not an explicit \
                         obstacle list"
                            .into(),
                    ));
                }
                Ok(list.clone())
            }
            SceneSpec::Crowding { n_obstacles, workspace, exclusions } => {
                let n = match attack {
                    AttackSpec::Crowding { n_obstacles: k } => *k,
                    _ => *n_obstacles,
                };
                Ok(generate_crowding_scene(n, seed, workspace, exclusions)?)
            }
        }
    }
}
