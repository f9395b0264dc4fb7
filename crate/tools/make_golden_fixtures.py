#!/usr/bin/env python3
"""Regenerate the binary NPY/NPZ test fixtures under crates/core/tests/data/.

The fixtures are produced by NumPy so the Rust reader is checked against an
independent reference writer. Run from the repository root:

    python3 tools/make_golden_fixtures.py
"""

import io
import pathlib
import zipfile

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/data"
OUT.mkdir(parents=True, exist_ok=True)


def save_version(path, array, version):
    with open(path, "wb") as f:
        np.lib.format.write_array(f, np.asanyarray(array), version=version)


def episode_arrays():
    rng = np.random.default_rng(1234)
    t, volumes, obstacles, dof = 4, 2, 3, 3
    return {
        "dist_robot_to_env": rng.uniform(-0.5, 1.5, size=(t, volumes, obstacles)),
        "dist_goal_arm": rng.uniform(0.0, 2.0, size=(t,)),
        "q_trace": rng.uniform(-1.0, 1.0, size=(t, dof)),
        "u_nominal_trace": rng.uniform(-1.0, 1.0, size=(t, dof)),
        "u_safe_trace": rng.uniform(-1.0, 1.0, size=(t, dof)),
        "filter_status_trace": np.array([0, 1, 2, 1], dtype="<i8"),
        "self_dist_trace": np.zeros((t, 0), dtype="<f8"),
        "meta_robot_kind": np.array(0, dtype="<i8"),
        "meta_filter_kind": np.array(6, dtype="<i8"),
        "meta_attack_kind": np.array(1, dtype="<i8"),
        "meta_attack_param": np.array(0.05, dtype="<f8"),
        "meta_seed": np.array(20, dtype="<i8"),
        "meta_config": np.array([0.01, 1.0, 2.0, 1.0, 0.0, 0.0], dtype="<f8"),
    }


def main():
    np.save(OUT / "golden_f64_shape3.npy", np.array([1.5, -2.5, 3.25], dtype="<f8"))
    np.save(OUT / "golden_scalar.npy", np.array(7.5, dtype="<f8"))
    np.save(OUT / "golden_bool.npy", np.array([True, False, True]))
    np.save(OUT / "golden_i32.npy", np.array([7, -8, 9], dtype="<i4"))
    save_version(OUT / "golden_v2.npy", np.array([4.0, 5.0], dtype="<f8"), (2, 0))
    save_version(OUT / "golden_v3.npy", np.array([6.0, 7.0], dtype="<f8"), (3, 0))

    arrays = episode_arrays()
    np.savez(OUT / "golden_episode_stored.npz", **arrays)
    np.savez_compressed(OUT / "golden_episode_deflate.npz", **arrays)

    extra = dict(arrays)
    extra["debug_misc"] = np.array([1.0, 2.0], dtype="<f8")
    np.savez(OUT / "golden_episode_extra.npz", **extra)

    missing = {k: v for k, v in arrays.items() if k != "dist_goal_arm"}
    np.savez(OUT / "golden_episode_missing.npz", **missing)

    # Expected values, frozen as key=value text for the Rust tests.
    with open(OUT / "golden_episode_expected.txt", "w") as f:
        flat = arrays["dist_robot_to_env"].ravel()
        f.write("dist_robot_to_env_first=%r\n" % float(flat[0]))
        f.write("dist_robot_to_env_last=%r\n" % float(flat[-1]))
        f.write("dist_goal_arm=%s\n" % ",".join(repr(float(x)) for x in arrays["dist_goal_arm"]))

    print("fixtures written to", OUT)


if __name__ == "__main__":
    main()
