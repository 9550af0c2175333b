//! Iterative LQR with inequality constraints folded in through exponential
//! barriers: Gauss-Newton backward pass, Levenberg-style regularization on
//! the control Hessian, and a backtracking line search that accepts any
//! cost decrease.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constraint::{barrier, barrier_capped, barrier_derivatives, ConstraintSpec};
use crate::cost::CostSpec;
use crate::dynamics::Dynamics;
use crate::error::CilqrError;
use crate::trajectory::Trajectory;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Relative tolerance on both the accepted cost decrease and the
    /// predicted decrease from the backward pass.
    pub tolerance: f64,
    pub reg_init: f64,
    pub reg_grow: f64,
    pub reg_shrink: f64,
    pub reg_min: f64,
    pub reg_max: f64,
    /// Line search tries α = 1, 1/2, …, 2^−(steps−1).
    pub line_search_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-6,
            reg_init: 1e-8,
            reg_grow: 10.0,
            reg_shrink: 0.5,
            reg_min: 1e-8,
            reg_max: 1e8,
            line_search_steps: 11,
        }
    }
}

/// What happened during a solve, for logging and feasibility decisions.
#[derive(Clone, Debug, Serialize)]
pub struct SolveDiagnostics {
    /// Backward passes performed.
    pub iterations: usize,
    /// Augmented cost after each accepted step; `costs[0]` is the seed cost.
    pub costs: Vec<f64>,
    pub converged: bool,
    /// Largest raw constraint value over the final trajectory (< 0 means
    /// strictly feasible).
    pub max_constraint: f64,
    /// True when any barrier on the final trajectory was evaluated in its
    /// capped linear region, i.e. a constraint was violated grossly.
    pub barrier_cap_hit: bool,
    pub final_regularization: f64,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub diagnostics: SolveDiagnostics,
}

/// Stage and terminal derivatives of cost + barriers along a trajectory.
struct StageDerivatives {
    l_s: DVector<f64>,
    l_u: DVector<f64>,
    l_ss: DMatrix<f64>,
    l_uu: DMatrix<f64>,
    l_us: DMatrix<f64>,
}

struct BackwardPass {
    feedforward: Vec<DVector<f64>>,
    gains: Vec<DMatrix<f64>>,
    /// Linear term of the predicted cost change, Σ kᵀQ_u (≤ 0 when the
    /// regularized control Hessians are positive definite).
    d1: f64,
}

/// Total cost plus barrier terms. Returns the value and whether any barrier
/// hit its linear cap; `None` when the trajectory produced a non-finite
/// number.
pub fn augmented_cost(
    cost: &CostSpec,
    constraints: &ConstraintSpec,
    traj: &Trajectory,
) -> Option<(f64, bool)> {
    if !traj.is_finite() {
        return None;
    }
    let mut total = cost.total(traj);
    let mut cap_hit = false;
    let q1 = constraints.barrier_q1;
    let q2 = constraints.barrier_q2;
    for k in 0..traj.horizon() {
        for c in &constraints.constraints {
            let g = c.value(k, &traj.states[k], Some(&traj.controls[k]));
            total += barrier(g, q1, q2);
            cap_hit |= barrier_capped(g, q2);
        }
    }
    let n = traj.horizon();
    for c in &constraints.constraints {
        if c.depends_on_state() {
            let g = c.value(n, &traj.states[n], None);
            total += barrier(g, q1, q2);
            cap_hit |= barrier_capped(g, q2);
        }
    }
    if total.is_finite() {
        Some((total, cap_hit))
    } else {
        None
    }
}

fn stage_derivatives(
    cost: &CostSpec,
    constraints: &ConstraintSpec,
    k: usize,
    s: &DVector<f64>,
    u: &DVector<f64>,
) -> StageDerivatives {
    let n = s.len();
    let m = u.len();
    let (mut l_s, mut l_u) = cost.stage_gradients(k, s, u);
    let mut l_ss = cost.q.clone();
    let mut l_uu = cost.r.clone();
    let mut l_us = DMatrix::zeros(m, n);
    let q1 = constraints.barrier_q1;
    let q2 = constraints.barrier_q2;
    for c in &constraints.constraints {
        let g = c.value(k, s, Some(u));
        let (db, d2b) = barrier_derivatives(g, q1, q2);
        let gs = c.grad_state(k, s);
        let gu = c.grad_control(m);
        l_s += &gs * db;
        l_u += &gu * db;
        l_ss += &gs * gs.transpose() * d2b + c.hess_state(n) * db;
        l_uu += &gu * gu.transpose() * d2b;
        l_us += &gu * gs.transpose() * d2b;
    }
    StageDerivatives {
        l_s,
        l_u,
        l_ss,
        l_uu,
        l_us,
    }
}

fn terminal_derivatives(
    cost: &CostSpec,
    constraints: &ConstraintSpec,
    s: &DVector<f64>,
    horizon: usize,
) -> (DVector<f64>, DMatrix<f64>) {
    let n = s.len();
    let mut v_s = cost.terminal_gradient(s);
    let mut v_ss = cost.qf.clone();
    let q1 = constraints.barrier_q1;
    let q2 = constraints.barrier_q2;
    for c in &constraints.constraints {
        if !c.depends_on_state() {
            continue;
        }
        let g = c.value(horizon, s, None);
        let (db, d2b) = barrier_derivatives(g, q1, q2);
        let gs = c.grad_state(horizon, s);
        v_s += &gs * db;
        v_ss += &gs * gs.transpose() * d2b + c.hess_state(n) * db;
    }
    (v_s, v_ss)
}

/// One Gauss-Newton backward sweep; `None` when a regularized control
/// Hessian fails its Cholesky factorization (caller grows λ and retries).
fn backward_pass<D: Dynamics>(
    dynamics: &D,
    cost: &CostSpec,
    constraints: &ConstraintSpec,
    traj: &Trajectory,
    lambda: f64,
) -> Option<BackwardPass> {
    let n = traj.horizon();
    let m = dynamics.control_dim();
    let (mut v_s, mut v_ss) = terminal_derivatives(cost, constraints, &traj.states[n], n);

    let mut feedforward = vec![DVector::zeros(0); n];
    let mut gains = vec![DMatrix::zeros(0, 0); n];
    let mut d1 = 0.0;

    for k in (0..n).rev() {
        let s = &traj.states[k];
        let u = &traj.controls[k];
        let (a, b) = dynamics.jacobians(s, u);
        let ld = stage_derivatives(cost, constraints, k, s, u);

        let q_s = &ld.l_s + a.transpose() * &v_s;
        let q_u = &ld.l_u + b.transpose() * &v_s;
        let q_ss = &ld.l_ss + a.transpose() * &v_ss * &a;
        let mut q_uu = &ld.l_uu + b.transpose() * &v_ss * &b;
        for i in 0..m {
            q_uu[(i, i)] += lambda;
        }
        q_uu = (&q_uu + q_uu.transpose()) * 0.5;
        let q_us = &ld.l_us + b.transpose() * &v_ss * &a;

        let chol = q_uu.clone().cholesky()?;
        let k_ff = -chol.solve(&q_u);
        let gain = -chol.solve(&q_us);

        d1 += k_ff.dot(&q_u);

        v_s = &q_s
            + gain.transpose() * &q_uu * &k_ff
            + gain.transpose() * &q_u
            + q_us.transpose() * &k_ff;
        v_ss = &q_ss
            + gain.transpose() * &q_uu * &gain
            + gain.transpose() * &q_us
            + q_us.transpose() * &gain;
        v_ss = (&v_ss + v_ss.transpose()) * 0.5;

        feedforward[k] = k_ff;
        gains[k] = gain;
    }

    Some(BackwardPass {
        feedforward,
        gains,
        d1,
    })
}

/// Closed-loop rollout u = ū + α·k + K(s − s̄); `None` on numeric blow-up.
fn forward_pass<D: Dynamics>(
    dynamics: &D,
    nominal: &Trajectory,
    pass: &BackwardPass,
    alpha: f64,
) -> Option<Trajectory> {
    let n = nominal.horizon();
    let mut states = Vec::with_capacity(n + 1);
    let mut controls = Vec::with_capacity(n);
    states.push(nominal.states[0].clone());
    for k in 0..n {
        let deviation = &states[k] - &nominal.states[k];
        let u = &nominal.controls[k] + &pass.feedforward[k] * alpha + &pass.gains[k] * deviation;
        if u.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let next = dynamics.step(&states[k], &u);
        if next.iter().any(|v| !v.is_finite()) {
            return None;
        }
        states.push(next);
        controls.push(u);
    }
    Some(Trajectory::new(states, controls))
}

/// Minimizes the barrier-augmented cost starting from `seed_controls`
/// rolled out from `s0`.
pub fn solve<D: Dynamics>(
    dynamics: &D,
    cost: &CostSpec,
    constraints: &ConstraintSpec,
    s0: DVector<f64>,
    seed_controls: Vec<DVector<f64>>,
    config: &SolverConfig,
) -> Result<Solution, CilqrError> {
    let n = seed_controls.len();
    if n == 0 {
        return Err(CilqrError::DimensionMismatch(
            "horizon must be at least 1".into(),
        ));
    }
    if cost.reference.len() != n + 1 {
        return Err(CilqrError::DimensionMismatch(format!(
            "reference has {} points, horizon {} needs {}",
            cost.reference.len(),
            n,
            n + 1
        )));
    }
    if s0.len() != dynamics.state_dim() {
        return Err(CilqrError::DimensionMismatch(format!(
            "initial state has dimension {}, dynamics expects {}",
            s0.len(),
            dynamics.state_dim()
        )));
    }

    let states = dynamics.rollout(&s0, &seed_controls);
    let mut traj = Trajectory::new(states, seed_controls);
    let (mut j, mut cap_hit) =
        augmented_cost(cost, constraints, &traj).ok_or(CilqrError::NonFiniteSeed)?;

    let mut lambda = config.reg_init;
    let mut costs = vec![j];
    let mut converged = false;
    let mut iterations = 0;

    'outer: while iterations < config.max_iterations {
        // Backward pass, growing λ until the control Hessians factor.
        let pass = loop {
            match backward_pass(dynamics, cost, constraints, &traj, lambda) {
                Some(p) => break p,
                None => {
                    lambda *= config.reg_grow;
                    if lambda > config.reg_max {
                        break 'outer;
                    }
                }
            }
        };
        iterations += 1;

        // A vanishing predicted decrease means the nominal is already a
        // stationary point of the augmented cost.
        if pass.d1.abs() < config.tolerance * j.abs().max(1.0) {
            converged = true;
            break;
        }

        let mut accepted = false;
        let mut alpha = 1.0;
        for _ in 0..config.line_search_steps {
            if let Some(candidate) = forward_pass(dynamics, &traj, &pass, alpha) {
                if let Some((j_new, hit)) = augmented_cost(cost, constraints, &candidate) {
                    if j_new < j {
                        let relative_drop = (j - j_new) / j.abs().max(1.0);
                        traj = candidate;
                        cap_hit = hit;
                        j = j_new;
                        costs.push(j);
                        lambda = (lambda * config.reg_shrink).max(config.reg_min);
                        accepted = true;
                        if relative_drop < config.tolerance {
                            converged = true;
                            break 'outer;
                        }
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }

        if !accepted {
            lambda *= config.reg_grow;
            if lambda > config.reg_max {
                break;
            }
        }
    }

    let max_constraint = constraints.max_violation(&traj);
    Ok(Solution {
        trajectory: traj,
        diagnostics: SolveDiagnostics {
            iterations,
            costs,
            converged,
            max_constraint,
            barrier_cap_hit: cap_hit,
            final_regularization: lambda,
        },
    })
}
