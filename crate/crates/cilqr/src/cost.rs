//! Quadratic tracking cost: stage state/control terms plus a terminal term.

use nalgebra::{DMatrix, DVector};

use crate::trajectory::Trajectory;

/// 0.5·(s−r_k)ᵀQ(s−r_k) + 0.5·uᵀRu per stage, 0.5·(s_N−r_N)ᵀQf(s_N−r_N)
/// at the end. `reference` holds N+1 target states.
#[derive(Clone, Debug)]
pub struct CostSpec {
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub qf: DMatrix<f64>,
    pub reference: Vec<DVector<f64>>,
}

impl CostSpec {
    pub fn new(
        q: DMatrix<f64>,
        r: DMatrix<f64>,
        qf: DMatrix<f64>,
        reference: Vec<DVector<f64>>,
    ) -> Self {
        assert_eq!(q.nrows(), q.ncols());
        assert_eq!(r.nrows(), r.ncols());
        assert_eq!(qf.nrows(), q.nrows());
        assert!(!reference.is_empty());
        Self { q, r, qf, reference }
    }

    pub fn stage(&self, k: usize, s: &DVector<f64>, u: &DVector<f64>) -> f64 {
        let ds = s - &self.reference[k];
        0.5 * (ds.dot(&(&self.q * &ds)) + u.dot(&(&self.r * u)))
    }

    pub fn terminal(&self, s: &DVector<f64>) -> f64 {
        let ds = s - self.reference.last().unwrap();
        0.5 * ds.dot(&(&self.qf * &ds))
    }

    /// Raw quadratic cost of a trajectory (no constraint terms).
    pub fn total(&self, traj: &Trajectory) -> f64 {
        let mut cost = 0.0;
        for k in 0..traj.horizon() {
            cost += self.stage(k, &traj.states[k], &traj.controls[k]);
        }
        cost + self.terminal(traj.states.last().unwrap())
    }

    pub fn stage_gradients(
        &self,
        k: usize,
        s: &DVector<f64>,
        u: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>) {
        let ds = s - &self.reference[k];
        (&self.q * ds, &self.r * u)
    }

    pub fn terminal_gradient(&self, s: &DVector<f64>) -> DVector<f64> {
        let ds = s - self.reference.last().unwrap();
        &self.qf * ds
    }
}
