//! Discrete-time dynamics models with analytic Jacobians.

use nalgebra::{DMatrix, DVector};

/// Discrete dynamics s_{k+1} = f(s_k, u_k) with first-order expansions.
pub trait Dynamics {
    fn state_dim(&self) -> usize;
    fn control_dim(&self) -> usize;
    fn step(&self, s: &DVector<f64>, u: &DVector<f64>) -> DVector<f64>;
    /// Returns (A, B) = (df/ds, df/du) evaluated at (s, u).
    fn jacobians(&self, s: &DVector<f64>, u: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>);

    /// Rolls out a control sequence from an initial state.
    fn rollout(&self, s0: &DVector<f64>, controls: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let mut states = Vec::with_capacity(controls.len() + 1);
        states.push(s0.clone());
        for u in controls {
            let next = self.step(states.last().unwrap(), u);
            states.push(next);
        }
        states
    }
}

/// Linear (optionally affine) dynamics s' = A s + B u + w.
#[derive(Clone, Debug)]
pub struct LinearDynamics {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub w: DVector<f64>,
}

impl LinearDynamics {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Self {
        let n = a.nrows();
        Self {
            a,
            b,
            w: DVector::zeros(n),
        }
    }

    pub fn with_offset(a: DMatrix<f64>, b: DMatrix<f64>, w: DVector<f64>) -> Self {
        Self { a, b, w }
    }
}

impl Dynamics for LinearDynamics {
    fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    fn control_dim(&self) -> usize {
        self.b.ncols()
    }

    fn step(&self, s: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        &self.a * s + &self.b * u + &self.w
    }

    fn jacobians(&self, _s: &DVector<f64>, _u: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.a.clone(), self.b.clone())
    }
}

/// Kinematic bicycle in state (x, y, v, heading) with controls
/// (acceleration, steer angle). Each planner step of `dt` seconds is
/// integrated as `substeps` forward-Euler slices, and the step Jacobian is
/// the chained product of the per-slice Jacobians. The rear/front axle
/// split matches the simulated vehicle (2.5 m / 2.5 m).
#[derive(Clone, Debug)]
pub struct BicycleDynamics {
    pub dt: f64,
    pub substeps: usize,
}

const L_REAR: f64 = 2.5;
const SLIP_RATIO: f64 = 0.5; // l_r / (l_f + l_r)

impl BicycleDynamics {
    pub fn new(dt: f64, substeps: usize) -> Self {
        assert!(dt > 0.0 && substeps > 0);
        Self { dt, substeps }
    }

    fn derivative(s: &[f64; 4], u: &[f64; 2]) -> [f64; 4] {
        let (v, psi) = (s[2], s[3]);
        let beta = (SLIP_RATIO * u[1].tan()).atan();
        [
            v * (psi + beta).cos(),
            v * (psi + beta).sin(),
            u[0],
            v / L_REAR * beta.sin(),
        ]
    }
}

impl Dynamics for BicycleDynamics {
    fn state_dim(&self) -> usize {
        4
    }

    fn control_dim(&self) -> usize {
        2
    }

    fn step(&self, s: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        let h = self.dt / self.substeps as f64;
        let mut x = [s[0], s[1], s[2], s[3]];
        let uu = [u[0], u[1]];
        for _ in 0..self.substeps {
            let d = Self::derivative(&x, &uu);
            for i in 0..4 {
                x[i] += h * d[i];
            }
        }
        DVector::from_row_slice(&x)
    }

    fn jacobians(&self, s: &DVector<f64>, u: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let h = self.dt / self.substeps as f64;
        let mut x = [s[0], s[1], s[2], s[3]];
        let uu = [u[0], u[1]];

        let beta = (SLIP_RATIO * uu[1].tan()).atan();
        let (sin_b, cos_b) = beta.sin_cos();
        // d beta / d steer = r sec^2(steer) / (1 + r^2 tan^2(steer))
        let sec2 = 1.0 / (uu[1].cos() * uu[1].cos());
        let tan_d = uu[1].tan();
        let dbeta = SLIP_RATIO * sec2 / (1.0 + SLIP_RATIO * SLIP_RATIO * tan_d * tan_d);

        let mut a_tot = DMatrix::<f64>::identity(4, 4);
        let mut b_tot = DMatrix::<f64>::zeros(4, 2);
        for _ in 0..self.substeps {
            let (v, psi) = (x[2], x[3]);
            let (sin_pb, cos_pb) = (psi + beta).sin_cos();

            // A_i = I + h * df/ds at the current substep point.
            let mut a_i = DMatrix::<f64>::identity(4, 4);
            a_i[(0, 2)] = h * cos_pb;
            a_i[(0, 3)] = h * (-v * sin_pb);
            a_i[(1, 2)] = h * sin_pb;
            a_i[(1, 3)] = h * (v * cos_pb);
            a_i[(3, 2)] = h * sin_b / L_REAR;

            // B_i = h * df/du.
            let mut b_i = DMatrix::<f64>::zeros(4, 2);
            b_i[(2, 0)] = h;
            b_i[(0, 1)] = h * (-v * sin_pb) * dbeta;
            b_i[(1, 1)] = h * (v * cos_pb) * dbeta;
            b_i[(3, 1)] = h * (v / L_REAR) * cos_b * dbeta;

            b_tot = &a_i * b_tot + b_i;
            a_tot = a_i * a_tot;

            let d = Self::derivative(&x, &uu);
            for i in 0..4 {
                x[i] += h * d[i];
            }
        }
        (a_tot, b_tot)
    }
}
