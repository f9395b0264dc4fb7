//! Benchmark configuration: a flat key-value text format with a versioned
//! header line, plus the resolution logic that turns (config, filter,
//! seed, attack) into one runnable episode.
//!
//! Grammar: the first significant line must be `safebench-config v1`;
//! every following significant line is `key = value`; `#` starts a
//! comment. Unknown keys are errors. List values are whitespace separated.

use anyhow::{anyhow, bail, Context, Result};
use safebench::attack::{Aabb, AttackFamily, AttackSpec, ExclusionBall, IntensityLevel};
use safebench::filters::{FilterKind, FilterParams};
use safebench::sim::{default_exclusions, default_workspace, SceneSpec, SimConfig};
use safebench::world::{Obstacle, RobotKind, RobotModel};
use std::path::PathBuf;

pub const CONFIG_HEADER: &str = "safebench-config v1";

/// How the benchmark's obstacle field is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum SceneKind {
    Crowding,
    Explicit,
}

/// The full experiment description.
#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub robot: RobotKind,
    pub dt: f64,
    /// Episode length; `None` picks 5000 for baseline runs and 2000 for
    /// attack runs.
    pub steps: Option<usize>,
    pub u_max: f64,
    pub k_p: f64,
    pub goal: [f64; 3],
    pub seeds: Vec<u64>,
    pub filters: Vec<FilterKind>,
    pub attack: Option<AttackFamily>,
    /// Subset of schedule levels to sweep; empty means the full schedule.
    pub levels: Vec<IntensityLevel>,
    pub scene: SceneKind,
    pub scene_obstacles: usize,
    pub workspace: Option<Aabb>,
    pub explicit_obstacles: Vec<Obstacle>,
    pub out_dir: PathBuf,
    pub jobs: usize,
    pub params: FilterParams,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        let sim = SimConfig::default();
        BenchmarkConfig {
            robot: RobotKind::RigidCluster,
            dt: sim.dt,
            steps: None,
            u_max: sim.u_max,
            k_p: sim.k_p,
            goal: sim.goal,
            seeds: vec![20, 21, 22],
            filters: vec![
                FilterKind::Rssa,
                FilterKind::Rsss,
                FilterKind::Ssa,
                FilterKind::Cbf,
                FilterKind::Pfm,
                FilterKind::Sma,
            ],
            attack: None,
            levels: vec![],
            scene: SceneKind::Crowding,
            scene_obstacles: 5,
            workspace: None,
            explicit_obstacles: vec![],
            out_dir: PathBuf::from("runs"),
            jobs: 0,
            params: FilterParams::default(),
        }
    }
}

pub fn parse_filter_name(name: &str) -> Result<FilterKind> {
    FilterKind::from_name(name).ok_or_else(|| {
        anyhow!(
            "unknown filter {name:?}; valid kinds: {}",
            FilterKind::ALL.map(|k| k.name()).join(", ")
        )
    })
}

impl BenchmarkConfig {
    /// Parse the text format, starting from the built-in defaults.
    pub fn parse(text: &str) -> Result<BenchmarkConfig> {
        let mut cfg = BenchmarkConfig::default();
        let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                None
            } else {
                Some((i + 1, line.to_string()))
            }
        });
        match lines.next() {
            Some((_, header)) if header == CONFIG_HEADER => {}
            Some((n, header)) => {
                bail!("line {n}: expected header {CONFIG_HEADER:?}, found {header:?}")
            }
            None => bail!("empty config file (expected header {CONFIG_HEADER:?})"),
        }

        for (n, line) in lines {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {n}: expected `key = value`, found {line:?}"))?;
            let key = key.trim();
            let value = value.trim();
            let ctx = |what: &str| format!("line {n}: invalid {what} {value:?}");
            match key {
                "robot" => {
                    cfg.robot = match value {
                        "rigid_cluster" => RobotKind::RigidCluster,
                        "planar_arm" => RobotKind::PlanarArm,
                        _ => bail!("line {n}: unknown robot {value:?} (rigid_cluster, planar_arm)"),
                    }
                }
                "dt" => cfg.dt = value.parse().with_context(|| ctx("dt"))?,
                "steps" => cfg.steps = Some(value.parse().with_context(|| ctx("steps"))?),
                "u_max" => cfg.u_max = value.parse().with_context(|| ctx("u_max"))?,
                "kp" => cfg.k_p = value.parse().with_context(|| ctx("kp"))?,
                "goal" => cfg.goal = parse_vec3(value).with_context(|| ctx("goal"))?,
                "seeds" => {
                    cfg.seeds = value
                        .split_whitespace()
                        .map(|s| s.parse::<u64>())
                        .collect::<std::result::Result<_, _>>()
                        .with_context(|| ctx("seeds"))?;
                }
                "filters" => {
                    cfg.filters = value
                        .split_whitespace()
                        .map(parse_filter_name)
                        .collect::<Result<_>>()
                        .with_context(|| format!("line {n}"))?;
                }
                "attack" => {
                    cfg.attack = match value {
                        "none" => None,
                        other => Some(AttackFamily::from_name(other).ok_or_else(|| {
                            anyhow!(
                                "line {n}: unknown attack {other:?} (none, noise, latency, crowding)"
                            )
                        })?),
                    }
                }
                "levels" => {
                    cfg.levels = value
                        .split_whitespace()
                        .map(|s| {
                            IntensityLevel::from_name(s).ok_or_else(|| {
                                anyhow!(
                                    "line {n}: unknown level {s:?} (nominal, low, medium, high)"
                                )
                            })
                        })
                        .collect::<Result<_>>()?;
                }
                "scene" => {
                    cfg.scene = match value {
                        "crowding" => SceneKind::Crowding,
                        "explicit" => SceneKind::Explicit,
                        _ => bail!("line {n}: unknown scene {value:?} (crowding, explicit)"),
                    }
                }
                "scene_obstacles" => {
                    cfg.scene_obstacles =
                        value.parse().with_context(|| ctx("scene_obstacles"))?
                }
                "workspace" => {
                    let v: Vec<f64> = value
                        .split_whitespace()
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .with_context(|| ctx("workspace"))?;
                    if v.len() != 6 {
                        bail!("line {n}: workspace needs 6 numbers (min xyz, max xyz)");
                    }
                    cfg.workspace =
                        Some(Aabb { min: [v[0], v[1], v[2]], max: [v[3], v[4], v[5]] });
                }
                "obstacle" => {
                    let v: Vec<f64> = value
                        .split_whitespace()
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .with_context(|| ctx("obstacle"))?;
                    if v.len() != 4 {
                        bail!("line {n}: obstacle needs 4 numbers (center xyz, radius)");
                    }
                    cfg.explicit_obstacles
                        .push(Obstacle { center: [v[0], v[1], v[2]], radius: v[3] });
                }
                "out" => cfg.out_dir = PathBuf::from(value),
                "jobs" => cfg.jobs = value.parse().with_context(|| ctx("jobs"))?,
                "d_margin" => cfg.params.d_margin = value.parse().with_context(|| ctx(key))?,
                "alpha" => cfg.params.alpha = value.parse().with_context(|| ctx(key))?,
                "eta" => cfg.params.eta = value.parse().with_context(|| ctx(key))?,
                "lambda_sss" => {
                    cfg.params.lambda_sss = value.parse().with_context(|| ctx(key))?
                }
                "k_rep" => cfg.params.k_rep = value.parse().with_context(|| ctx(key))?,
                "rho0" => cfg.params.rho0 = value.parse().with_context(|| ctx(key))?,
                "rep_cap" => cfg.params.rep_cap = value.parse().with_context(|| ctx(key))?,
                "rep_sum_cap" => {
                    cfg.params.rep_sum_cap = value.parse().with_context(|| ctx(key))?
                }
                "k_slide" => cfg.params.k_slide = value.parse().with_context(|| ctx(key))?,
                "eps_robust" => {
                    cfg.params.eps_robust = value.parse().with_context(|| ctx(key))?
                }
                other => bail!("line {n}: unknown key {other:?}"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<BenchmarkConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            bail!("seed list is empty");
        }
        if self.filters.is_empty() {
            bail!("filter list is empty");
        }
        if let Some(steps) = self.steps {
            if steps == 0 {
                bail!("steps must be >= 1");
            }
        }
        if self.scene == SceneKind::Explicit && self.explicit_obstacles.is_empty() {
            bail!("scene = explicit requires at least one `obstacle = x y z r` line");
        }
        if self.scene == SceneKind::Explicit && self.attack == Some(AttackFamily::Crowding) {
            bail!("a crowding attack requires scene = crowding");
        }
        let mut params = self.params.clone();
        params.u_max = self.u_max;
        params.validate().map_err(|e| anyhow!(e))?;
        Ok(())
    }

    pub fn model(&self) -> RobotModel {
        RobotModel::for_kind(self.robot)
    }

    /// Episode length for one attack: explicit `steps`, else 5000 for
    /// nominal runs and 2000 for attack runs.
    pub fn steps_for(&self, attack: &AttackSpec) -> usize {
        self.steps.unwrap_or(match attack.canonical() {
            AttackSpec::Nominal => 5000,
            _ => 2000,
        })
    }

    pub fn sim_config(&self, seed: u64, attack: &AttackSpec) -> SimConfig {
        SimConfig {
            dt: self.dt,
            steps: self.steps_for(attack),
            seed,
            u_max: self.u_max,
            k_p: self.k_p,
            goal: self.goal,
        }
    }

    pub fn filter_params(&self) -> FilterParams {
        let mut params = self.params.clone();
        params.u_max = self.u_max;
        params
    }

    pub fn scene_spec(&self) -> SceneSpec {
        match self.scene {
            SceneKind::Explicit => SceneSpec::Explicit(self.explicit_obstacles.clone()),
            SceneKind::Crowding => {
                let model = self.model();
                let workspace =
                    self.workspace.unwrap_or_else(|| default_workspace(self.robot));
                let exclusions: Vec<ExclusionBall> = default_exclusions(&model, self.goal);
                SceneSpec::Crowding {
                    n_obstacles: self.scene_obstacles,
                    workspace,
                    exclusions,
                }
            }
        }
    }
}

fn parse_vec3(value: &str) -> Result<[f64; 3]> {
    let v: Vec<f64> = value
        .split_whitespace()
        .map(|s| s.parse::<f64>())
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != 3 {
        bail!("expected 3 numbers");
    }
    Ok([v[0], v[1], v[2]])
}

/// Render a config back to its text form (used by `--dump-config`).
pub fn render_config(cfg: &BenchmarkConfig) -> String {
    let mut out = String::new();
    out.push_str(CONFIG_HEADER);
    out.push('\n');
    out.push_str(&format!("robot = {}\n", cfg.robot.name()));
    out.push_str(&format!("dt = {}\n", cfg.dt));
    if let Some(steps) = cfg.steps {
        out.push_str(&format!("steps = {steps}\n"));
    }
    out.push_str(&format!("u_max = {}\n", cfg.u_max));
    out.push_str(&format!("kp = {}\n", cfg.k_p));
    out.push_str(&format!("goal = {} {} {}\n", cfg.goal[0], cfg.goal[1], cfg.goal[2]));
    out.push_str(&format!(
        "seeds = {}\n",
        cfg.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
    ));
    out.push_str(&format!(
        "filters = {}\n",
        cfg.filters.iter().map(|f| f.name()).collect::<Vec<_>>().join(" ")
    ));
    out.push_str(&format!(
        "attack = {}\n",
        cfg.attack.map_or("none", |a| a.name())
    ));
    if !cfg.levels.is_empty() {
        out.push_str(&format!(
            "levels = {}\n",
            cfg.levels.iter().map(|l| l.name()).collect::<Vec<_>>().join(" ")
        ));
    }
    match cfg.scene {
        SceneKind::Crowding => {
            out.push_str("scene = crowding\n");
            out.push_str(&format!("scene_obstacles = {}\n", cfg.scene_obstacles));
        }
        SceneKind::Explicit => {
            out.push_str("scene = explicit\n");
            for o in &cfg.explicit_obstacles {
                out.push_str(&format!(
                    "obstacle = {} {} {} {}\n",
                    o.center[0], o.center[1], o.center[2], o.radius
                ));
            }
        }
    }
    if let Some(w) = cfg.workspace {
        out.push_str(&format!(
            "workspace = {} {} {} {} {} {}\n",
            w.min[0], w.min[1], w.min[2], w.max[0], w.max[1], w.max[2]
        ));
    }
    out.push_str(&format!("out = {}\n", cfg.out_dir.display()));
    out.push_str(&format!("jobs = {}\n", cfg.jobs));
    let p = &cfg.params;
    out.push_str(&format!("d_margin = {}\n", p.d_margin));
    out.push_str(&format!("alpha = {}\n", p.alpha));
    out.push_str(&format!("eta = {}\n", p.eta));
    out.push_str(&format!("lambda_sss = {}\n", p.lambda_sss));
    out.push_str(&format!("k_rep = {}\n", p.k_rep));
    out.push_str(&format!("rho0 = {}\n", p.rho0));
    out.push_str(&format!("rep_cap = {}\n", p.rep_cap));
    out.push_str(&format!("rep_sum_cap = {}\n", p.rep_sum_cap));
    out.push_str(&format!("k_slide = {}\n", p.k_slide));
    out.push_str(&format!("eps_robust = {}\n", p.eps_robust));
    out
}
