//! Dense projection QP: minimize |u - u_nom|^2 subject to half-space
//! constraints a_k . u >= b_k and the box |u_i| <= u_max.
//!
//! Solved with a dual active-set method specialized to the identity
//! Hessian: start at the unconstrained optimum u_nom, repeatedly pull in
//! the most violated constraint, and maintain a working set of linearly
//! independent active normals with nonnegative multipliers. Infeasibility
//! is certified when a violated constraint lies in the span of the active
//! normals and no multiplier can be traded off.
//!
//! The working set never exceeds the number of degrees of freedom, so all
//! linear algebra is on matrices of size <= dof x dof.

use serde::{Deserialize, Serialize};

/// Feasibility tolerance: a point satisfies a constraint when
/// a . u >= b - FEASIBILITY_TOL.
pub const FEASIBILITY_TOL: f64 = 1e-9;

// Rows whose component orthogonal to the working set falls below this
// (relative) threshold are treated as dependent; admitting them makes the
// working-set Gram system unsolvable.
const SPAN_TOL: f64 = 1e-7;
const MULTIPLIER_TOL: f64 = 1e-11;

/// One half-space constraint a . u >= b.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub a: Vec<f64>,
    pub b: f64,
}

impl LinearConstraint {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        LinearConstraint { a, b }
    }

    fn eval(&self, u: &[f64]) -> f64 {
        dot(&self.a, u) - self.b
    }
}

/// Result of a projection solve.
#[derive(Debug, Clone, PartialEq)]
pub enum QpOutcome {
    /// The projection of u_nom onto the feasible polytope.
    Optimal(Vec<f64>),
    /// No point satisfies all constraints and the box.
    Infeasible,
}

impl QpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, QpOutcome::Optimal(_))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Solve min |u - u_nom|^2 s.t. a_k . u >= b_k and -u_max <= u_i <= u_max.
pub fn solve_projection_qp(
    u_nom: &[f64],
    constraints: &[LinearConstraint],
    u_max: f64,
) -> QpOutcome {
    let n = u_nom.len();

    // Full constraint list: the callers' rows plus the box faces.
    let mut rows: Vec<LinearConstraint> = Vec::with_capacity(constraints.len() + 2 * n);
    for c in constraints {
        let norm_sq: f64 = c.a.iter().map(|x| x * x).sum();
        if norm_sq <= 1e-30 {
            if c.b > FEASIBILITY_TOL {
                return QpOutcome::Infeasible; // 0 . u >= b > 0 has no solution
            }
            continue; // vacuous row
        }
        rows.push(c.clone());
    }
    for i in 0..n {
        let mut lo = vec![0.0; n];
        lo[i] = 1.0;
        rows.push(LinearConstraint::new(lo, -u_max));
        let mut hi = vec![0.0; n];
        hi[i] = -1.0;
        rows.push(LinearConstraint::new(hi, -u_max));
    }

    let mut u = u_nom.to_vec();
    let mut active: Vec<usize> = Vec::new();
    let mut lambda: Vec<f64> = Vec::new();

    let max_iters = 50 * (rows.len() + n) + 100;
    let mut iters = 0;

    loop {
        iters += 1;
        if iters > max_iters {
            return QpOutcome::Infeasible;
        }
        // Most violated constraint at the current point, across every row.
        let mut worst: Option<(usize, f64)> = None;
        for (k, row) in rows.iter().enumerate() {
            let v = row.eval(&u);
            if v < -FEASIBILITY_TOL && worst.map_or(true, |(_, wv)| v < wv) {
                worst = Some((k, v));
            }
        }
        let Some((p, _)) = worst else {
            return QpOutcome::Optimal(u);
        };
        // A working-set row can drift off its boundary when a nearly
        // dependent row slipped in; eject it and pull it back cleanly.
        if let Some(idx) = active.iter().position(|&k| k == p) {
            active.remove(idx);
            lambda.remove(idx);
        }

        // Pull constraint p into the working set, trading off active
        // multipliers as needed.
        let mut lambda_p = 0.0;
        loop {
            iters += 1;
            if iters > max_iters {
                // Stalled on a degenerate cycle; treat as unsolvable so the
                // caller falls back to the brake.
                return QpOutcome::Infeasible;
            }

            let a_p = &rows[p].a;
            let (z, r) = project_onto_active(a_p, &rows, &active);
            let z_norm_sq = dot(&z, &z);
            let a_scale = 1.0 + dot(a_p, a_p);

            if z_norm_sq <= SPAN_TOL * SPAN_TOL * a_scale {
                // a_p lies in the span of the active normals.
                let mut t1 = f64::INFINITY;
                let mut drop_idx = None;
                for (idx, &rk) in r.iter().enumerate() {
                    if rk > MULTIPLIER_TOL {
                        let step = lambda[idx] / rk;
                        if step < t1 {
                            t1 = step;
                            drop_idx = Some(idx);
                        }
                    }
                }
                let Some(di) = drop_idx else {
                    return QpOutcome::Infeasible;
                };
                for (idx, l) in lambda.iter_mut().enumerate() {
                    *l -= t1 * r[idx];
                }
                lambda_p += t1;
                active.remove(di);
                lambda.remove(di);
                continue;
            }

            // Primal step length that lands p on its boundary.
            let violation = -rows[p].eval(&u);
            let t2 = violation / z_norm_sq;

            // Dual step length before an active multiplier hits zero.
            let mut t1 = f64::INFINITY;
            let mut drop_idx = None;
            for (idx, &rk) in r.iter().enumerate() {
                if rk > MULTIPLIER_TOL {
                    let step = lambda[idx] / rk;
                    if step < t1 {
                        t1 = step;
                        drop_idx = Some(idx);
                    }
                }
            }

            let t = t1.min(t2);
            for (ui, zi) in u.iter_mut().zip(z.iter()) {
                *ui += t * zi;
            }
            for (idx, l) in lambda.iter_mut().enumerate() {
                *l -= t * r[idx];
            }
            lambda_p += t;

            if t2 <= t1 {
                active.push(p);
                lambda.push(lambda_p);
                break;
            }
            let di = drop_idx.expect("t1 finite implies a droppable row");
            active.remove(di);
            lambda.remove(di);
        }
    }
}

/// Decompose a_p = N^T r + z where N holds the active normals as rows and
/// z is orthogonal to all of them. Returns (z, r).
fn project_onto_active(
    a_p: &[f64],
    rows: &[LinearConstraint],
    active: &[usize],
) -> (Vec<f64>, Vec<f64>) {
    let n = a_p.len();
    let m = active.len();
    if m == 0 {
        return (a_p.to_vec(), vec![]);
    }
    // Gram matrix G = N N^T and right-hand side N a_p.
    let mut g = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for (i, &ai) in active.iter().enumerate() {
        rhs[i] = dot(&rows[ai].a, a_p);
        for (j, &aj) in active.iter().enumerate() {
            g[i][j] = dot(&rows[ai].a, &rows[aj].a);
        }
    }
    let r = solve_spd(&mut g, &mut rhs);
    let mut z = a_p.to_vec();
    for (i, &ai) in active.iter().enumerate() {
        for (zk, ak) in z.iter_mut().zip(rows[ai].a.iter()).take(n) {
            *zk -= r[i] * ak;
        }
    }
    (z, r)
}

/// Solve the small symmetric positive definite system G x = b in place by
/// Gaussian elimination with partial pivoting.
fn solve_spd(g: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let m = b.len();
    for col in 0..m {
        let mut piv = col;
        for row in (col + 1)..m {
            if g[row][col].abs() > g[piv][col].abs() {
                piv = row;
            }
        }
        g.swap(col, piv);
        b.swap(col, piv);
        let diag = g[col][col];
        if diag.abs() < 1e-300 {
            continue; // numerically singular; leave the row as-is
        }
        for row in (col + 1)..m {
            let f = g[row][col] / diag;
            if f == 0.0 {
                continue;
            }
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
        let diag = g[col][col];
        x[col] = if diag.abs() < 1e-300 { 0.0 } else { s / diag };
    }
    x
}
