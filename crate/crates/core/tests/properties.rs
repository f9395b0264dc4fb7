//! Property tests over the crate's structural invariants.

use proptest::prelude::*;
use safebench::filters::qp::{solve_projection_qp, LinearConstraint, QpOutcome};
use safebench::metrics::{collision_steps, min_env_trace, summarize_run};
use safebench::sim::{EpisodeLog, SimConfig};
use safebench::store::npz::{decode_npz, encode_npz};
use safebench::store::reports::format_sig6;
use safebench::world::{
    compute_pairwise_info, min_env_distance, wrap_angle, Obstacle, RobotModel, RobotState,
};

fn arb_status() -> impl Strategy<Value = safebench::filters::FilterStatus> {
    use safebench::filters::FilterStatus::*;
    prop_oneof![Just(Inactive), Just(Active), Just(NoSolution)]
}

fn arb_attack() -> impl Strategy<Value = safebench::attack::AttackSpec> {
    use safebench::attack::AttackSpec::*;
    prop_oneof![
        Just(Nominal),
        (0.001f64..0.5).prop_map(|sigma| Noise { sigma }),
        (1usize..20).prop_map(|delay| Latency { delay }),
        (1usize..40).prop_map(|n_obstacles| Crowding { n_obstacles }),
    ]
}

prop_compose! {
    fn arb_log()(
        steps in 1usize..20,
        volumes in 1usize..4,
        obstacles in 0usize..4,
        self_pairs in 0usize..3,
        seed in any::<u64>(),
        attack in arb_attack(),
    )(
        env in prop::collection::vec(-1.0f64..1.0, steps * volumes * obstacles),
        goal in prop::collection::vec(0.0f64..3.0, steps),
        q in prop::collection::vec(-3.0f64..3.0, steps * 3),
        u_nom in prop::collection::vec(-1.0f64..1.0, steps * 3),
        u_safe in prop::collection::vec(-1.0f64..1.0, steps * 3),
        status in prop::collection::vec(arb_status(), steps),
        self_d in prop::collection::vec(-0.5f64..1.0, steps * self_pairs),
        steps in Just(steps),
        volumes in Just(volumes),
        obstacles in Just(obstacles),
        self_pairs in Just(self_pairs),
        seed in Just(seed),
        attack in Just(attack),
    ) -> EpisodeLog {
        EpisodeLog {
            robot: safebench::world::RobotKind::RigidCluster,
            filter: safebench::filters::FilterKind::Cbf,
            attack,
            config: SimConfig { steps, seed, ..Default::default() },
            dof: 3,
            volumes,
            obstacles,
            self_pairs,
            dist_robot_to_env: env,
            dist_goal_arm: goal,
            q_trace: q,
            u_nominal_trace: u_nom,
            u_safe_trace: u_safe,
            filter_status_trace: status,
            self_dist_trace: self_d,
        }
    }
}

proptest! {
    #[test]
    fn npz_round_trip_preserves_logs(log in arb_log()) {
        let bytes = encode_npz(&log);
        prop_assert_eq!(&bytes, &encode_npz(&log));
        let loaded = decode_npz(&bytes).unwrap();
        prop_assert_eq!(loaded.log, log);
    }

    #[test]
    fn sig6_formatting_matches_reference_rounding(
        mantissa in -1.0f64..1.0,
        exp in -12i32..12,
    ) {
        let x = mantissa * 10f64.powi(exp);
        let printed: f64 = format_sig6(x).parse().unwrap();
        // Reference 6-significant-digit rounding via scientific notation.
        let reference: f64 = format!("{x:.5e}").parse().unwrap();
        let ulp = (reference.abs() * f64::EPSILON).max(f64::MIN_POSITIVE);
        prop_assert!(
            (printed - reference).abs() <= ulp,
            "{} printed as {} vs reference {}", x, printed, reference
        );
    }

    #[test]
    fn min_trace_is_permutation_invariant(log in arb_log()) {
        prop_assume!(log.volumes * log.obstacles > 0);
        let base = min_env_trace(&log).unwrap();
        let mut reversed = log.clone();
        let block = log.volumes * log.obstacles;
        for chunk in reversed.dist_robot_to_env.chunks_exact_mut(block) {
            chunk.reverse();
        }
        prop_assert_eq!(min_env_trace(&reversed).unwrap(), base);
    }

    #[test]
    fn collision_steps_compose_with_the_trace(log in arb_log()) {
        prop_assume!(log.volumes * log.obstacles > 0);
        let trace = min_env_trace(&log).unwrap();
        let m = summarize_run(&log).unwrap();
        prop_assert_eq!(m.collision_steps, collision_steps(&trace));
        prop_assert!(m.collision_steps <= log.steps());
    }

    #[test]
    fn qp_feasible_solutions_satisfy_their_constraints(
        u_nom in prop::collection::vec(-2.0f64..2.0, 3),
        u_max in 0.2f64..2.0,
        rows in prop::collection::vec(
            (prop::collection::vec(-1.0f64..1.0, 3), -1.5f64..1.5),
            0..7,
        ),
    ) {
        let cons: Vec<LinearConstraint> =
            rows.into_iter().map(|(a, b)| LinearConstraint::new(a, b)).collect();
        match solve_projection_qp(&u_nom, &cons, u_max) {
            QpOutcome::Optimal(u) => {
                for c in &cons {
                    let v: f64 = c.a.iter().zip(&u).map(|(x, y)| x * y).sum::<f64>() - c.b;
                    prop_assert!(v >= -1e-7);
                }
                for x in &u {
                    prop_assert!(x.abs() <= u_max + 1e-9);
                }
            }
            QpOutcome::Infeasible => {}
        }
    }

    #[test]
    fn wrap_angle_stays_on_the_circle(a in -100.0f64..100.0) {
        let w = wrap_angle(a);
        prop_assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
        // Difference is a whole number of turns.
        let turns = (a - w) / (2.0 * std::f64::consts::PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn clearance_sign_marks_overlap(
        q in prop::collection::vec(-1.0f64..1.0, 3),
        center in prop::collection::vec(-1.0f64..1.0, 3),
        radius in 0.05f64..0.5,
    ) {
        let model = RobotModel::rigid_cluster();
        let obstacles = [Obstacle { center: [center[0], center[1], center[2]], radius }];
        let state = RobotState::new(q, 0);
        let info = compute_pairwise_info(&model, &state, &obstacles).unwrap();
        let (centers, _) = safebench::world::forward_kinematics(&model, &state).unwrap();
        for (i, _, d, _) in info.pairs() {
            let c = centers[i];
            let dist = ((c[0] - center[0]).powi(2)
                + (c[1] - center[1]).powi(2)
                + (c[2] - center[2]).powi(2))
            .sqrt();
            let overlapping = dist < model.volumes[i].radius + radius;
            prop_assert_eq!(d < 0.0, overlapping);
        }
        let min = min_env_distance(&info).unwrap();
        for &d in &info.d {
            prop_assert!(min <= d);
        }
    }
}
