//! Closed-form finite-horizon tracking LQR for affine dynamics
//! s' = A·s + B·u + w. Independent of the iterative solver; used to
//! cross-check it on problems where both must agree.

use nalgebra::{DMatrix, DVector};

use crate::cost::CostSpec;
use crate::dynamics::{Dynamics, LinearDynamics};
use crate::trajectory::Trajectory;

/// Time-varying affine feedback u_k = −K_k·s_k − d_k.
#[derive(Clone, Debug)]
pub struct LqrPolicy {
    pub gains: Vec<DMatrix<f64>>,
    pub offsets: Vec<DVector<f64>>,
}

impl LqrPolicy {
    pub fn horizon(&self) -> usize {
        self.gains.len()
    }

    pub fn control(&self, k: usize, s: &DVector<f64>) -> DVector<f64> {
        -&self.gains[k] * s - &self.offsets[k]
    }
}

/// Backward Riccati recursion for the tracking problem
///   min Σ 0.5(s_k−r_k)ᵀQ(s_k−r_k) + 0.5 u_kᵀR u_k  +  0.5(s_N−r_N)ᵀQf(s_N−r_N)
/// over horizon n. `cost.reference` must hold n+1 points.
pub fn solve_tracking_lqr(dynamics: &LinearDynamics, cost: &CostSpec, n: usize) -> LqrPolicy {
    assert_eq!(cost.reference.len(), n + 1, "reference length");
    let a = &dynamics.a;
    let b = &dynamics.b;
    let w = &dynamics.w;

    // Value function 0.5 sᵀP s + pᵀ s + const, seeded at the terminal stage.
    let mut big_p = cost.qf.clone();
    let mut small_p = -(&cost.qf * &cost.reference[n]);

    let mut gains = vec![DMatrix::zeros(0, 0); n];
    let mut offsets = vec![DVector::zeros(0); n];

    for k in (0..n).rev() {
        let pa = &big_p * a;
        let pw_p = &big_p * w + &small_p;
        let m = &cost.r + b.transpose() * &big_p * b;
        let chol = m
            .clone()
            .cholesky()
            .expect("control cost must be positive definite");
        let gain = chol.solve(&(b.transpose() * &pa));
        let offset = chol.solve(&(b.transpose() * &pw_p));

        big_p = &cost.q + a.transpose() * &pa - gain.transpose() * &m * &gain;
        big_p = (&big_p + big_p.transpose()) * 0.5;
        small_p = -(&cost.q * &cost.reference[k]) + a.transpose() * &pw_p
            - gain.transpose() * &m * &offset;

        gains[k] = gain;
        offsets[k] = offset;
    }

    LqrPolicy { gains, offsets }
}

/// Roll the policy forward from s0 through the same affine dynamics.
pub fn rollout_policy(
    dynamics: &LinearDynamics,
    policy: &LqrPolicy,
    s0: DVector<f64>,
) -> Trajectory {
    let n = policy.horizon();
    let mut states = Vec::with_capacity(n + 1);
    let mut controls = Vec::with_capacity(n);
    states.push(s0);
    for k in 0..n {
        let u = policy.control(k, &states[k]);
        let next = dynamics.step(&states[k], &u);
        states.push(next);
        controls.push(u);
    }
    Trajectory::new(states, controls)
}
