//! Geometry and perception ground truth.
//!
//! Robots are modeled as sets of spheres ("volumes") attached to one of two
//! kinematic skeletons: a translating rigid cluster or a 3-joint planar arm.
//! The central quantity is [`PairwiseInfo`]: the matrix of signed
//! surface-to-surface clearances between every robot volume and every
//! obstacle, together with the configuration-space gradient of each entry.
//! Safety filters consume this matrix; perception attacks corrupt it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Distance below which two sphere centers are treated as coincident and
/// the clearance gradient is undefined (resolved to zero).
pub const COINCIDENT_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("configuration has {got} coordinates, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("pairwise info has no entries")]
    EmptyPairwise,
    #[error("invalid robot model: {0}")]
    InvalidModel(String),
}

/// Which kinematic skeleton a robot uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RobotKind {
    /// A rigid set of spheres translating freely; q is the (x, y, z) offset.
    RigidCluster,
    /// A 3-joint revolute chain in the z = 0 plane; q holds joint angles.
    PlanarArm,
}

impl RobotKind {
    pub fn name(&self) -> &'static str {
        match self {
            RobotKind::RigidCluster => "rigid_cluster",
            RobotKind::PlanarArm => "planar_arm",
        }
    }
}

/// Where a collision volume sits on the skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VolumeAnchor {
    /// Fixed offset from the cluster translation (RigidCluster only).
    Offset([f64; 3]),
    /// A point a fraction `s` of the way along link `link` (PlanarArm only).
    LinkPoint { link: usize, s: f64 },
}

/// One spherical collision volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Volume {
    pub anchor: VolumeAnchor,
    pub radius: f64,
}

/// Kinematic description of a robot: skeleton kind, collision volumes, and
/// which volume is tracked against the goal (the "arm" volume).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    pub kind: RobotKind,
    pub volumes: Vec<Volume>,
    /// Link lengths in meters; empty for the rigid cluster.
    pub link_lengths: Vec<f64>,
    pub dof: usize,
    pub arm_volume_index: usize,
}

impl RobotModel {
    /// The default translating cluster: a leading arm sphere with two
    /// trailing satellites, dof 3.
    pub fn rigid_cluster() -> Self {
        RobotModel {
            kind: RobotKind::RigidCluster,
            volumes: vec![
                Volume { anchor: VolumeAnchor::Offset([0.0, 0.0, 0.0]), radius: 0.10 },
                Volume { anchor: VolumeAnchor::Offset([-0.12, 0.07, 0.0]), radius: 0.08 },
                Volume { anchor: VolumeAnchor::Offset([-0.12, -0.07, 0.0]), radius: 0.08 },
            ],
            link_lengths: vec![],
            dof: 3,
            arm_volume_index: 0,
        }
    }

    /// The default planar arm: three links with a volume at each link
    /// midpoint plus the end effector, dof 3.
    pub fn planar_arm() -> Self {
        Self::planar_arm_with_links([0.5, 0.4, 0.3])
    }

    /// Planar arm with custom link lengths (midpoint volumes + end effector).
    pub fn planar_arm_with_links(links: [f64; 3]) -> Self {
        RobotModel {
            kind: RobotKind::PlanarArm,
            volumes: vec![
                Volume { anchor: VolumeAnchor::LinkPoint { link: 0, s: 0.5 }, radius: 0.06 },
                Volume { anchor: VolumeAnchor::LinkPoint { link: 1, s: 0.5 }, radius: 0.06 },
                Volume { anchor: VolumeAnchor::LinkPoint { link: 2, s: 0.5 }, radius: 0.06 },
                Volume { anchor: VolumeAnchor::LinkPoint { link: 2, s: 1.0 }, radius: 0.08 },
            ],
            link_lengths: links.to_vec(),
            dof: 3,
            arm_volume_index: 3,
        }
    }

    pub fn for_kind(kind: RobotKind) -> Self {
        match kind {
            RobotKind::RigidCluster => Self::rigid_cluster(),
            RobotKind::PlanarArm => Self::planar_arm(),
        }
    }

    /// Check the structural invariants (positive radii and lengths, anchor
    /// indices in range, arm volume in range).
    pub fn validate(&self) -> Result<(), WorldError> {
        if self.volumes.is_empty() {
            return Err(WorldError::InvalidModel("no collision volumes".into()));
        }
        if self.arm_volume_index >= self.volumes.len() {
            return Err(WorldError::InvalidModel(format!(
                "arm volume index {} out of range ({} volumes)",
                self.arm_volume_index,
                self.volumes.len()
            )));
        }
        for v in &self.volumes {
            if !(v.radius > 0.0) {
                return Err(WorldError::InvalidModel("volume radius must be > 0".into()));
            }
            match v.anchor {
                VolumeAnchor::Offset(o) => {
                    if self.kind != RobotKind::RigidCluster {
                        return Err(WorldError::InvalidModel(
                            "offset anchor on a non-cluster model".into(),
                        ));
                    }
                    if !o.iter().all(|x| x.is_finite()) {
                        return Err(WorldError::InvalidModel("non-finite volume offset".into()));
                    }
                }
                VolumeAnchor::LinkPoint { link, s } => {
                    if self.kind != RobotKind::PlanarArm {
                        return Err(WorldError::InvalidModel(
                            "link anchor on a non-arm model".into(),
                        ));
                    }
                    if link >= self.link_lengths.len() {
                        return Err(WorldError::InvalidModel(format!(
                            "link index {link} out of range"
                        )));
                    }
                    if !(0.0..=1.0).contains(&s) {
                        return Err(WorldError::InvalidModel(
                            "link fraction outside [0, 1]".into(),
                        ));
                    }
                }
            }
        }
        for &l in &self.link_lengths {
            if !(l > 0.0) {
                return Err(WorldError::InvalidModel("link length must be > 0".into()));
            }
        }
        Ok(())
    }

    pub fn num_volumes(&self) -> usize {
        self.volumes.len()
    }

    /// Non-adjacent volume index pairs on the chain (self-distance pairs).
    /// Empty for the rigid cluster, whose volumes never move relative to
    /// each other.
    pub fn self_pairs(&self) -> Vec<(usize, usize)> {
        match self.kind {
            RobotKind::RigidCluster => vec![],
            RobotKind::PlanarArm => {
                let n = self.volumes.len();
                let mut pairs = Vec::new();
                for i in 0..n {
                    for j in (i + 2)..n {
                        pairs.push((i, j));
                    }
                }
                pairs
            }
        }
    }
}

/// A robot configuration plus the step index it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub q: Vec<f64>,
    pub t: usize,
}

impl RobotState {
    pub fn new(q: Vec<f64>, t: usize) -> Self {
        RobotState { q, t }
    }

    /// Zero configuration at step 0.
    pub fn origin(dof: usize) -> Self {
        RobotState { q: vec![0.0; dof], t: 0 }
    }
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// A static sphere obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: [f64; 3],
    pub radius: f64,
}

/// Jacobian of one volume center with respect to q, stored column-wise:
/// `cols[m]` is the 3-vector d(center)/d(q_m).
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub cols: Vec<[f64; 3]>,
}

impl Jacobian {
    pub fn identity(dof: usize) -> Self {
        let mut cols = vec![[0.0; 3]; dof];
        for (m, col) in cols.iter_mut().enumerate().take(3) {
            col[m] = 1.0;
        }
        Jacobian { cols }
    }

    /// J^T * v for a task-space 3-vector v; result has length dof.
    pub fn transpose_apply(&self, v: [f64; 3]) -> Vec<f64> {
        self.cols
            .iter()
            .map(|c| c[0] * v[0] + c[1] * v[1] + c[2] * v[2])
            .collect()
    }
}

/// Per-(volume, obstacle) signed clearances and their configuration-space
/// gradients at one step. `d` is row-major volumes x obstacles; `grad` is
/// row-major volumes x obstacles x dof.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseInfo {
    pub t: usize,
    pub volumes: usize,
    pub obstacles: usize,
    pub dof: usize,
    pub d: Vec<f64>,
    pub grad: Vec<f64>,
}

impl PairwiseInfo {
    pub fn num_pairs(&self) -> usize {
        self.volumes * self.obstacles
    }

    pub fn dist(&self, vol: usize, obs: usize) -> f64 {
        self.d[vol * self.obstacles + obs]
    }

    pub fn gradient(&self, vol: usize, obs: usize) -> &[f64] {
        let k = (vol * self.obstacles + obs) * self.dof;
        &self.grad[k..k + self.dof]
    }

    /// Pairs in row-major order: (volume index, obstacle index, d, grad).
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64, &[f64])> {
        (0..self.volumes).flat_map(move |i| {
            (0..self.obstacles).map(move |j| (i, j, self.dist(i, j), self.gradient(i, j)))
        })
    }

    pub fn is_finite(&self) -> bool {
        self.d.iter().all(|x| x.is_finite()) && self.grad.iter().all(|x| x.is_finite())
    }
}

/// Compute the center and Jacobian of every collision volume.
///
/// RigidCluster: center_i = q + offset_i with identity Jacobians.
/// PlanarArm: planar chain with cumulative joint angles; the z row of every
/// Jacobian is zero.
pub fn forward_kinematics(
    model: &RobotModel,
    state: &RobotState,
) -> Result<(Vec<[f64; 3]>, Vec<Jacobian>), WorldError> {
    if state.q.len() != model.dof {
        return Err(WorldError::DimensionMismatch {
            expected: model.dof,
            got: state.q.len(),
        });
    }
    match model.kind {
        RobotKind::RigidCluster => {
            let mut centers = Vec::with_capacity(model.volumes.len());
            let mut jacobians = Vec::with_capacity(model.volumes.len());
            for v in &model.volumes {
                let VolumeAnchor::Offset(off) = v.anchor else {
                    return Err(WorldError::InvalidModel(
                        "cluster volume without offset anchor".into(),
                    ));
                };
                centers.push([
                    state.q[0] + off[0],
                    state.q[1] + off[1],
                    state.q[2] + off[2],
                ]);
                jacobians.push(Jacobian::identity(model.dof));
            }
            Ok((centers, jacobians))
        }
        RobotKind::PlanarArm => {
            let n_links = model.link_lengths.len();
            // Cumulative angles and joint base positions.
            let mut cum = vec![0.0; n_links];
            let mut acc = 0.0;
            for (k, c) in cum.iter_mut().enumerate() {
                acc += state.q[k];
                *c = acc;
            }
            // joint_pos[k] = position of joint k (base of link k).
            let mut joint_pos = vec![[0.0f64; 3]; n_links + 1];
            for k in 0..n_links {
                let l = model.link_lengths[k];
                joint_pos[k + 1] = [
                    joint_pos[k][0] + l * cum[k].cos(),
                    joint_pos[k][1] + l * cum[k].sin(),
                    0.0,
                ];
            }

            let mut centers = Vec::with_capacity(model.volumes.len());
            let mut jacobians = Vec::with_capacity(model.volumes.len());
            for v in &model.volumes {
                let VolumeAnchor::LinkPoint { link, s } = v.anchor else {
                    return Err(WorldError::InvalidModel(
                        "arm volume without link anchor".into(),
                    ));
                };
                let c = [
                    joint_pos[link][0] + s * model.link_lengths[link] * cum[link].cos(),
                    joint_pos[link][1] + s * model.link_lengths[link] * cum[link].sin(),
                    0.0,
                ];
                // d(center)/d(q_m): joint m rotates everything distal to it.
                // Contribution of link k's direction term to the derivative
                // w.r.t. q_m exists when m <= k.
                let mut cols = vec![[0.0f64; 3]; model.dof];
                for (m, col) in cols.iter_mut().enumerate() {
                    let mut dx = 0.0;
                    let mut dy = 0.0;
                    for k in m..=link {
                        let eff = if k == link {
                            s * model.link_lengths[k]
                        } else {
                            model.link_lengths[k]
                        };
                        dx += -eff * cum[k].sin();
                        dy += eff * cum[k].cos();
                    }
                    *col = [dx, dy, 0.0];
                }
                centers.push(c);
                jacobians.push(Jacobian { cols });
            }
            Ok((centers, jacobians))
        }
    }
}

/// Build the pairwise clearance/gradient matrix between every robot volume
/// and every obstacle.
///
/// d_ij = |c_i - o_j| - r_i - R_j (signed surface-to-surface clearance, so
/// d < 0 means the spheres overlap). grad_ij = J_i^T (c_i - o_j)/|c_i - o_j|;
/// coincident centers get d = -(r_i + R_j) and a zero gradient.
pub fn compute_pairwise_info(
    model: &RobotModel,
    state: &RobotState,
    obstacles: &[Obstacle],
) -> Result<PairwiseInfo, WorldError> {
    let (centers, jacobians) = forward_kinematics(model, state)?;
    let nv = centers.len();
    let no = obstacles.len();
    let dof = model.dof;
    let mut d = Vec::with_capacity(nv * no);
    let mut grad = Vec::with_capacity(nv * no * dof);
    for i in 0..nv {
        let c = centers[i];
        let r = model.volumes[i].radius;
        for (j, obs) in obstacles.iter().enumerate() {
            let _ = j;
            let diff = [
                c[0] - obs.center[0],
                c[1] - obs.center[1],
                c[2] - obs.center[2],
            ];
            let dist = (diff[0] * diff[0] + diff[1] * diff[1] + diff[2] * diff[2]).sqrt();
            if dist < COINCIDENT_EPS {
                d.push(-(r + obs.radius));
                grad.extend(std::iter::repeat(0.0).take(dof));
            } else {
                d.push(dist - r - obs.radius);
                let normal = [diff[0] / dist, diff[1] / dist, diff[2] / dist];
                grad.extend(jacobians[i].transpose_apply(normal));
            }
        }
    }
    Ok(PairwiseInfo { t: state.t, volumes: nv, obstacles: no, dof, d, grad })
}

/// Minimum entry of the clearance matrix (the step's environment-safety
/// value). Errors when the matrix has no entries.
pub fn min_env_distance(info: &PairwiseInfo) -> Result<f64, WorldError> {
    if info.d.is_empty() {
        return Err(WorldError::EmptyPairwise);
    }
    Ok(info.d.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Signed clearances between non-adjacent volume pairs on the arm, in the
/// order given by [`RobotModel::self_pairs`]. Empty for the rigid cluster.
pub fn self_pair_distances(model: &RobotModel, state: &RobotState) -> Result<Vec<f64>, WorldError> {
    let pairs = model.self_pairs();
    if pairs.is_empty() {
        return Ok(vec![]);
    }
    let (centers, _) = forward_kinematics(model, state)?;
    Ok(pairs
        .iter()
        .map(|&(i, j)| {
            let a = centers[i];
            let b = centers[j];
            let dist = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2))
                .sqrt();
            dist - model.volumes[i].radius - model.volumes[j].radius
        })
        .collect())
}
