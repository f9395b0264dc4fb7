//! Deterministic safety-filter robustness benchmark.
//!
//! The crate simulates two desk-scale kinematic robots (a translating
//! sphere cluster and a planar arm) tracking a goal through a field of
//! static sphere obstacles, with a configurable safety filter between the
//! nominal controller and the integrator. Perception-level attacks (noise,
//! latency, obstacle crowding) corrupt the pairwise robot-obstacle
//! information the filter consumes, while the simulated world itself stays
//! untouched. Episode logs serialize to NumPy-compatible `.npz` archives
//! and reduce to collision/goal-tracking metrics with CSV/JSON reports.
//!
//! Module map:
//! - [`world`] — robot kinematics, obstacles, pairwise distances and gradients
//! - [`filters`] — the safety filters and their shared projection QP
//! - [`attack`] — the perception attack channel and scene crowding
//! - [`sim`] — the episode loop and step-wise logging
//! - [`metrics`] — per-run metrics and multi-seed aggregation
//! - [`store`] — NPY/NPZ serialization and report export

pub mod attack;
pub mod filters;
pub mod metrics;
pub mod sim;
pub mod store;
pub mod testkit;
pub mod world;
