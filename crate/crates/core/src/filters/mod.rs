//! Safety filters: given the nominal control and the (possibly corrupted)
//! pairwise clearance info, produce a safe control and a feasibility status.
//!
//! Five of the filters (SSA, RSSA, SSS, RSSS, CBF) reduce to linear
//! half-space constraints on the control and share the projection QP in
//! [`qp`]. PFM adds explicit repulsion terms and SMA projects out the
//! approaching component of the most critical pair. The robust variants
//! tighten every perceived clearance by a fixed margin before building
//! constraints.

pub mod qp;

pub use qp::{solve_projection_qp, LinearConstraint, QpOutcome};

use crate::world::PairwiseInfo;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Clearance floor for the PFM repulsion magnitude; closer (or overlapping)
/// pairs are treated as being at this distance.
pub const PFM_MIN_DIST: f64 = 1e-4;

const ZERO_GRAD_TOL: f64 = 1e-30;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("{0:?} does not build linear constraints")]
    NotConstraintBased(FilterKind),
    #[error("pairwise info contains non-finite entries")]
    NonFiniteInfo,
    #[error("nominal control has {got} entries, info expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// The available safety filters. `NoFilter` passes the nominal control
/// through untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterKind {
    NoFilter,
    Pfm,
    Ssa,
    Rssa,
    Sss,
    Rsss,
    Cbf,
    Sma,
}

impl FilterKind {
    pub const ALL: [FilterKind; 8] = [
        FilterKind::NoFilter,
        FilterKind::Pfm,
        FilterKind::Ssa,
        FilterKind::Rssa,
        FilterKind::Sss,
        FilterKind::Rsss,
        FilterKind::Cbf,
        FilterKind::Sma,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FilterKind::NoFilter => "none",
            FilterKind::Pfm => "pfm",
            FilterKind::Ssa => "ssa",
            FilterKind::Rssa => "rssa",
            FilterKind::Sss => "sss",
            FilterKind::Rsss => "rsss",
            FilterKind::Cbf => "cbf",
            FilterKind::Sma => "sma",
        }
    }

    pub fn from_name(name: &str) -> Option<FilterKind> {
        FilterKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Filters whose safe control comes from the shared projection QP.
    pub fn is_qp_family(&self) -> bool {
        matches!(
            self,
            FilterKind::Ssa | FilterKind::Rssa | FilterKind::Sss | FilterKind::Rsss | FilterKind::Cbf
        )
    }

    fn is_robust(&self) -> bool {
        matches!(self, FilterKind::Rssa | FilterKind::Rsss)
    }
}

/// Tunable filter parameters. All values must be positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    /// Activation / safety margin in meters.
    pub d_margin: f64,
    /// CBF class-K gain (1/s).
    pub alpha: f64,
    /// SSA decay rate (m/s).
    pub eta: f64,
    /// SSS decay gain (1/s).
    pub lambda_sss: f64,
    /// PFM repulsion gain.
    pub k_rep: f64,
    /// PFM influence radius in meters.
    pub rho0: f64,
    /// Per-pair cap on the PFM repulsion magnitude (units of q per
    /// second). The raw 1/d^2 term grows without bound near contact; a
    /// real actuator cannot follow it, so each term saturates here.
    pub rep_cap: f64,
    /// Norm cap on PFM's summed repulsion (units of q per second): the
    /// total corrective command a saturated actuator can spend.
    pub rep_sum_cap: f64,
    /// SMA sliding gain (m/s).
    pub k_slide: f64,
    /// Constraint tightening for the robust variants, in meters.
    pub eps_robust: f64,
    /// Per-component control bound, inherited from the simulation config.
    pub u_max: f64,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            d_margin: 0.05,
            alpha: 5.0,
            eta: 0.1,
            lambda_sss: 5.0,
            k_rep: 0.5,
            rho0: 0.15,
            rep_cap: 0.9,
            rep_sum_cap: 1.2,
            k_slide: 0.05,
            eps_robust: 0.05,
            u_max: 1.0,
        }
    }
}

impl FilterParams {
    pub fn validate(&self) -> Result<(), String> {
        let fields = [
            ("d_margin", self.d_margin),
            ("alpha", self.alpha),
            ("eta", self.eta),
            ("lambda_sss", self.lambda_sss),
            ("k_rep", self.k_rep),
            ("rho0", self.rho0),
            ("rep_cap", self.rep_cap),
            ("rep_sum_cap", self.rep_sum_cap),
            ("k_slide", self.k_slide),
            ("eps_robust", self.eps_robust),
            ("u_max", self.u_max),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("filter parameter {name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

/// Whether the filter left the control alone, modified it, or found no
/// feasible control at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterStatus {
    Inactive,
    Active,
    NoSolution,
}

impl FilterStatus {
    pub fn code(&self) -> i64 {
        match self {
            FilterStatus::Inactive => 0,
            FilterStatus::Active => 1,
            FilterStatus::NoSolution => 2,
        }
    }

    pub fn from_code(code: i64) -> Option<FilterStatus> {
        match code {
            0 => Some(FilterStatus::Inactive),
            1 => Some(FilterStatus::Active),
            2 => Some(FilterStatus::NoSolution),
            _ => None,
        }
    }
}

/// Result of one filter evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    pub u_safe: Vec<f64>,
    pub status: FilterStatus,
    /// Constraints imposed (QP family), repulsion pairs (PFM), or 1 when
    /// SMA intervened.
    pub active_pairs: usize,
}

/// Constraint set built from one pairwise snapshot, plus the count of
/// degenerate pairs (zero gradient while the activation condition held).
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltConstraints {
    pub constraints: Vec<LinearConstraint>,
    pub degenerate_pairs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn clamp_box(u: &mut [f64], u_max: f64) {
    for x in u.iter_mut() {
        *x = x.clamp(-u_max, u_max);
    }
}

/// Build the linear half-space constraints for a QP-family filter.
///
/// Per pair with effective clearance `de` (tightened by `eps_robust` for
/// the robust variants):
/// - CBF: g . u >= -alpha (de - d_margin), for every pair;
/// - SSA: g . u >= eta, only when de <= d_margin;
/// - SSS: g . u >= -lambda_sss (de - d_margin), only when de <= 2 d_margin.
///
/// The SSS decay anchors at the margin surface rather than the obstacle
/// surface: decaying the raw clearance would park the robot exactly on the
/// collision boundary, where rounding flips the collision indicator.
pub fn build_constraints(
    kind: FilterKind,
    params: &FilterParams,
    info: &PairwiseInfo,
) -> Result<BuiltConstraints, FilterError> {
    if !kind.is_qp_family() {
        return Err(FilterError::NotConstraintBased(kind));
    }
    let tighten = if kind.is_robust() { params.eps_robust } else { 0.0 };
    let mut constraints = Vec::new();
    let mut degenerate = 0usize;
    for (_, _, d, g) in info.pairs() {
        let de = d - tighten;
        let zero_grad = dot(g, g) <= ZERO_GRAD_TOL;
        match kind {
            FilterKind::Cbf => {
                let b = -params.alpha * (de - params.d_margin);
                if zero_grad {
                    if b > 0.0 {
                        degenerate += 1;
                    }
                } else {
                    constraints.push(LinearConstraint::new(g.to_vec(), b));
                }
            }
            FilterKind::Ssa | FilterKind::Rssa => {
                if de <= params.d_margin {
                    if zero_grad {
                        degenerate += 1;
                    } else {
                        constraints.push(LinearConstraint::new(g.to_vec(), params.eta));
                    }
                }
            }
            FilterKind::Sss | FilterKind::Rsss => {
                if de <= 2.0 * params.d_margin {
                    if zero_grad {
                        degenerate += 1;
                    } else {
                        constraints.push(LinearConstraint::new(
                            g.to_vec(),
                            -params.lambda_sss * (de - params.d_margin),
                        ));
                    }
                }
            }
            _ => unreachable!("guarded by is_qp_family"),
        }
    }
    Ok(BuiltConstraints { constraints, degenerate_pairs: degenerate })
}

/// PFM repulsion sum before clamping, plus the count of pairs inside the
/// influence radius. Each pair's repulsion magnitude saturates at
/// `rep_cap`; the summed repulsion saturates at `rep_sum_cap` in norm.
fn pfm_unclamped(params: &FilterParams, u_nom: &[f64], info: &PairwiseInfo) -> (Vec<f64>, usize) {
    let mut rep = vec![0.0; u_nom.len()];
    let mut within = 0usize;
    for (_, _, d, g) in info.pairs() {
        if d < params.rho0 {
            within += 1;
            let dd = d.max(PFM_MIN_DIST);
            let mag =
                (params.k_rep * (1.0 / dd - 1.0 / params.rho0) / (dd * dd)).min(params.rep_cap);
            for (rk, gk) in rep.iter_mut().zip(g.iter()) {
                *rk += mag * gk;
            }
        }
    }
    let norm = rep.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > params.rep_sum_cap {
        let scale = params.rep_sum_cap / norm;
        for r in rep.iter_mut() {
            *r *= scale;
        }
    }
    let u = u_nom.iter().zip(rep.iter()).map(|(uk, rk)| uk + rk).collect();
    (u, within)
}

/// SMA control before clamping. Returns `None` when the filter stays
/// inactive; `Some((u, zero_grad))` otherwise.
fn sma_unclamped(
    params: &FilterParams,
    u_nom: &[f64],
    info: &PairwiseInfo,
) -> Option<(Vec<f64>, bool)> {
    // Most critical pair: smallest clearance, ties by lowest row-major index.
    let mut crit: Option<(f64, usize, usize)> = None;
    for (i, j, d, _) in info.pairs() {
        if crit.map_or(true, |(cd, _, _)| d < cd) {
            crit = Some((d, i, j));
        }
    }
    let (min_d, ci, cj) = crit?;
    if min_d >= params.d_margin {
        return None;
    }
    let g = info.gradient(ci, cj);
    let g_norm_sq = dot(g, g);
    if g_norm_sq <= ZERO_GRAD_TOL {
        return Some((vec![0.0; u_nom.len()], true));
    }
    let g_norm = g_norm_sq.sqrt();
    let approach = dot(g, u_nom).min(0.0);
    let u = u_nom
        .iter()
        .zip(g.iter())
        .map(|(uk, gk)| uk - approach / g_norm_sq * gk + params.k_slide / g_norm * gk)
        .collect();
    Some((u, false))
}

/// Run one safety filter on the perceived pairwise info.
///
/// The info must be finite (attacks only ever shift clearances by finite
/// amounts). The QP family degrades to `NoSolution` with a zero (brake)
/// control when its constraint polytope is empty.
pub fn apply_filter(
    kind: FilterKind,
    params: &FilterParams,
    u_nom: &[f64],
    info: &PairwiseInfo,
) -> Result<FilterOutput, FilterError> {
    if !info.is_finite() {
        return Err(FilterError::NonFiniteInfo);
    }
    if u_nom.len() != info.dof {
        return Err(FilterError::DimensionMismatch { expected: info.dof, got: u_nom.len() });
    }
    match kind {
        FilterKind::NoFilter => Ok(FilterOutput {
            u_safe: u_nom.to_vec(),
            status: FilterStatus::Inactive,
            active_pairs: 0,
        }),
        FilterKind::Pfm => {
            let (mut u, within) = pfm_unclamped(params, u_nom, info);
            clamp_box(&mut u, params.u_max);
            let status = if within > 0 { FilterStatus::Active } else { FilterStatus::Inactive };
            Ok(FilterOutput { u_safe: u, status, active_pairs: within })
        }
        FilterKind::Sma => match sma_unclamped(params, u_nom, info) {
            None => Ok(FilterOutput {
                u_safe: u_nom.to_vec(),
                status: FilterStatus::Inactive,
                active_pairs: 0,
            }),
            Some((mut u, _)) => {
                clamp_box(&mut u, params.u_max);
                Ok(FilterOutput { u_safe: u, status: FilterStatus::Active, active_pairs: 1 })
            }
        },
        _ => {
            let built = build_constraints(kind, params, info)?;
            if built.constraints.is_empty() {
                return Ok(FilterOutput {
                    u_safe: u_nom.to_vec(),
                    status: FilterStatus::Inactive,
                    active_pairs: 0,
                });
            }
            match solve_projection_qp(u_nom, &built.constraints, params.u_max) {
                QpOutcome::Optimal(mut u) => {
                    clamp_box(&mut u, params.u_max);
                    let status = if u == u_nom { FilterStatus::Inactive } else { FilterStatus::Active };
                    Ok(FilterOutput {
                        u_safe: u,
                        status,
                        active_pairs: built.constraints.len(),
                    })
                }
                QpOutcome::Infeasible => Ok(FilterOutput {
                    u_safe: vec![0.0; u_nom.len()],
                    status: FilterStatus::NoSolution,
                    active_pairs: built.constraints.len(),
                }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{qp_oracle, random_pairwise_info};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single_pair_info(d: f64, g: [f64; 3]) -> PairwiseInfo {
        PairwiseInfo { t: 0, volumes: 1, obstacles: 1, dof: 3, d: vec![d], grad: g.to_vec() }
    }

    #[test]
    fn cbf_single_pair_formula() {
        let params = FilterParams::default();
        let info = single_pair_info(1.0, [0.0, 1.0, 0.0]);
        let built = build_constraints(FilterKind::Cbf, &params, &info).unwrap();
        assert_eq!(built.constraints.len(), 1);
        // Independent scalar recomputation of the bound.
        let expected_b = -(params.alpha * 1.0 - params.alpha * params.d_margin);
        assert!((built.constraints[0].b - expected_b).abs() < 1e-12);
        assert!((built.constraints[0].b + 4.75).abs() < 1e-12);
    }

    #[test]
    fn ssa_slack_pairs_build_nothing() {
        let params = FilterParams::default();
        let info = single_pair_info(0.2, [1.0, 0.0, 0.0]);
        let built = build_constraints(FilterKind::Ssa, &params, &info).unwrap();
        assert!(built.constraints.is_empty());
        assert_eq!(built.degenerate_pairs, 0);
    }

    #[test]
    fn build_constraints_rejects_non_qp_kinds() {
        let params = FilterParams::default();
        let info = single_pair_info(0.2, [1.0, 0.0, 0.0]);
        for kind in [FilterKind::NoFilter, FilterKind::Pfm, FilterKind::Sma] {
            assert!(matches!(
                build_constraints(kind, &params, &info),
                Err(FilterError::NotConstraintBased(_))
            ));
        }
    }

    #[test]
    fn robust_activation_is_superset() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params = FilterParams::default();
        for _ in 0..200 {
            let info = random_pairwise_info(&mut rng, 3, 4);
            for (plain, robust) in
                [(FilterKind::Ssa, FilterKind::Rssa), (FilterKind::Sss, FilterKind::Rsss)]
            {
                let base = build_constraints(plain, &params, &info).unwrap();
                let tight = build_constraints(robust, &params, &info).unwrap();
                assert!(
                    tight.constraints.len() + tight.degenerate_pairs
                        >= base.constraints.len() + base.degenerate_pairs,
                    "robust variant activated fewer pairs"
                );
                // Every plain activation is also a robust activation.
                for c in &base.constraints {
                    assert!(tight.constraints.iter().any(|t| t.a == c.a));
                }
            }
        }
    }

    #[test]
    fn degenerate_pair_is_counted_not_constrained() {
        let params = FilterParams::default();
        // Coincident-center style pair: overlapping with zero gradient.
        let info = single_pair_info(-0.3, [0.0, 0.0, 0.0]);
        for kind in [FilterKind::Cbf, FilterKind::Ssa, FilterKind::Sss] {
            let built = build_constraints(kind, &params, &info).unwrap();
            assert!(built.constraints.is_empty());
            assert_eq!(built.degenerate_pairs, 1, "{kind:?}");
        }
    }

    #[test]
    fn far_field_is_inactive_for_every_kind() {
        let params = FilterParams::default();
        let info = single_pair_info(5.0, [1.0, 0.0, 0.0]); // > 10 * d_margin, > rho0
        let u_nom = vec![0.4, -0.2, 0.0];
        for kind in FilterKind::ALL {
            let out = apply_filter(kind, &params, &u_nom, &info).unwrap();
            assert_eq!(out.u_safe, u_nom, "{kind:?}");
            assert_eq!(out.status, FilterStatus::Inactive, "{kind:?}");
        }
    }

    #[test]
    fn ssa_single_pair_closed_form() {
        let params = FilterParams::default();
        let info = single_pair_info(0.01, [1.0, 0.0, 0.0]);
        let out = apply_filter(FilterKind::Ssa, &params, &[-1.0, 0.0, 0.0], &info).unwrap();
        assert_eq!(out.status, FilterStatus::Active);
        assert!((out.u_safe[0] - 0.1).abs() < 1e-9);
        assert!(out.u_safe[1].abs() < 1e-12 && out.u_safe[2].abs() < 1e-12);
    }

    #[test]
    fn cbf_pinch_has_no_solution() {
        let params = FilterParams::default();
        // Two overlapping pairs with exactly opposed gradients, both deep
        // inside the margin: the half-spaces cannot intersect.
        let info = PairwiseInfo {
            t: 0,
            volumes: 1,
            obstacles: 2,
            dof: 3,
            d: vec![-0.02, -0.02],
            grad: vec![1.0, 0.0, 0.0, -1.0, 0.0, 0.0],
        };
        let built = build_constraints(FilterKind::Cbf, &params, &info).unwrap();
        assert!(qp_oracle(&[0.0; 3], &built.constraints, params.u_max).is_none());
        let out = apply_filter(FilterKind::Cbf, &params, &[1.0, 0.0, 0.0], &info).unwrap();
        assert_eq!(out.status, FilterStatus::NoSolution);
        assert_eq!(out.u_safe, vec![0.0; 3]);
    }

    #[test]
    fn pfm_repulsion_terms_align_with_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let params = FilterParams::default();
        for _ in 0..200 {
            let info = random_pairwise_info(&mut rng, 2, 3);
            let u_nom = vec![0.0; 3];
            let (u, _) = pfm_unclamped(&params, &u_nom, &info);
            // Sum of repulsions only; each term is a nonnegative multiple of
            // its gradient, so check per-pair contributions directly.
            for (_, _, d, g) in info.pairs() {
                if d < params.rho0 {
                    let dd = d.max(PFM_MIN_DIST);
                    let mag = (params.k_rep * (1.0 / dd - 1.0 / params.rho0) / (dd * dd))
                        .min(params.rep_cap);
                    assert!(mag >= 0.0);
                    let term: Vec<f64> = g.iter().map(|x| mag * x).collect();
                    assert!(dot(&term, g) >= 0.0);
                }
            }
            let _ = u;
        }
    }

    #[test]
    fn pfm_saturates_at_the_distance_floor() {
        let params = FilterParams::default();
        let deep = single_pair_info(-0.2, [0.0, 1.0, 0.0]);
        let out = apply_filter(FilterKind::Pfm, &params, &[0.0; 3], &deep).unwrap();
        assert_eq!(out.status, FilterStatus::Active);
        // The raw 1/d^2 term is astronomically large here; the output is
        // pinned at the per-pair repulsion cap.
        assert!((out.u_safe[1] - params.rep_cap).abs() < 1e-12);

        // Two deep pairs in one direction hit the sum cap instead.
        let two = PairwiseInfo {
            t: 0,
            volumes: 1,
            obstacles: 2,
            dof: 3,
            d: vec![-0.2, -0.2],
            grad: vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
        };
        let out = apply_filter(FilterKind::Pfm, &params, &[0.0; 3], &two).unwrap();
        assert!((out.u_safe[1] - params.rep_sum_cap.min(params.u_max)).abs() < 1e-12);
    }

    #[test]
    fn sma_slides_along_the_critical_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let params = FilterParams::default();
        let mut intervened = 0;
        for _ in 0..300 {
            let info = random_pairwise_info(&mut rng, 2, 3);
            let u_nom: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if let Some((u_pre, zero_grad)) = sma_unclamped(&params, &u_nom, &info) {
                if zero_grad {
                    assert_eq!(u_pre, vec![0.0; 3]);
                    continue;
                }
                intervened += 1;
                // Critical pair: smallest clearance, row-major tie-break.
                let mut crit = (f64::INFINITY, 0, 0);
                for (i, j, d, _) in info.pairs() {
                    if d < crit.0 {
                        crit = (d, i, j);
                    }
                }
                let g = info.gradient(crit.1, crit.2);
                let g_norm = dot(g, g).sqrt();
                let along: f64 = dot(g, &u_pre) / g_norm;
                assert!(
                    along >= params.k_slide - 1e-9,
                    "non-approach violated: {along} < {}",
                    params.k_slide
                );
            }
        }
        assert!(intervened > 50, "SMA never intervened in the random suite");
    }

    #[test]
    fn sma_zero_gradient_brakes() {
        let params = FilterParams::default();
        let info = single_pair_info(-0.3, [0.0, 0.0, 0.0]);
        let out = apply_filter(FilterKind::Sma, &params, &[0.8, 0.0, 0.0], &info).unwrap();
        assert_eq!(out.status, FilterStatus::Active);
        assert_eq!(out.u_safe, vec![0.0; 3]);
    }

    #[test]
    fn minimal_intervention_and_constraint_satisfaction() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let params = FilterParams::default();
        let mut satisfied_cases = 0;
        let mut active_cases = 0;
        for _ in 0..400 {
            let info = random_pairwise_info(&mut rng, 2, 3);
            let u_nom: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.9..0.9)).collect();
            for kind in [FilterKind::Ssa, FilterKind::Rssa, FilterKind::Sss, FilterKind::Rsss, FilterKind::Cbf]
            {
                let built = build_constraints(kind, &params, &info).unwrap();
                let ok = built.constraints.iter().all(|c| dot(&c.a, &u_nom) - c.b >= 0.0);
                let out = apply_filter(kind, &params, &u_nom, &info).unwrap();
                if ok {
                    satisfied_cases += 1;
                    assert_eq!(out.u_safe, u_nom, "{kind:?} moved an already-safe control");
                }
                if out.status == FilterStatus::Active {
                    active_cases += 1;
                    for c in &built.constraints {
                        assert!(
                            dot(&c.a, &out.u_safe) - c.b >= -1e-7,
                            "{kind:?} active solution violates a constraint"
                        );
                    }
                }
                assert!(out.u_safe.iter().all(|x| x.abs() <= params.u_max + 1e-9));
            }
        }
        assert!(satisfied_cases > 100);
        assert!(active_cases > 100);
    }

    #[test]
    fn non_finite_info_is_rejected() {
        let params = FilterParams::default();
        let info = single_pair_info(f64::NAN, [1.0, 0.0, 0.0]);
        assert!(matches!(
            apply_filter(FilterKind::Cbf, &params, &[0.0; 3], &info),
            Err(FilterError::NonFiniteInfo)
        ));
    }

    #[test]
    fn filter_names_round_trip() {
        for kind in FilterKind::ALL {
            assert_eq!(FilterKind::from_name(kind.name()), Some(kind));
        }
        assert_eq!(FilterKind::from_name("bogus"), None);
    }
}
