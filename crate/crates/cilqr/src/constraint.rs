//! Inequality constraints g < 0 shaped into the cost by an exponential
//! barrier, with analytic first and second derivatives.

use nalgebra::{DMatrix, DVector};

/// Exponent cap: beyond q2·g = CAP the barrier continues linearly (C¹), so
/// deeply violated seeds still have finite cost and a useful gradient.
pub const BARRIER_EXPONENT_CAP: f64 = 30.0;

/// Barrier value q1·exp(q2·g), linearly extended past the exponent cap.
pub fn barrier(g: f64, q1: f64, q2: f64) -> f64 {
    let z = q2 * g;
    if z <= BARRIER_EXPONENT_CAP {
        q1 * z.exp()
    } else {
        q1 * BARRIER_EXPONENT_CAP.exp() * (1.0 + (z - BARRIER_EXPONENT_CAP))
    }
}

/// (db/dg, d²b/dg²) of the capped barrier.
pub fn barrier_derivatives(g: f64, q1: f64, q2: f64) -> (f64, f64) {
    let z = q2 * g;
    if z <= BARRIER_EXPONENT_CAP {
        let w = q1 * z.exp();
        (q2 * w, q2 * q2 * w)
    } else {
        (q1 * q2 * BARRIER_EXPONENT_CAP.exp(), 0.0)
    }
}

/// True when the barrier was evaluated in its capped (linear) region.
pub fn barrier_capped(g: f64, q2: f64) -> bool {
    q2 * g > BARRIER_EXPONENT_CAP
}

/// One scalar constraint g(k, s, u) < 0. State layout is (x, y, v, heading)
/// for the vehicle variants; `StateHalfPlane` and `ControlBound` are layout-
/// agnostic.
#[derive(Clone, Debug)]
pub enum Constraint {
    /// Keep-out ellipse around a point moving at constant velocity:
    /// g = 1 − ((x−cx)/semi_x)² − ((y−cy)/semi_y)², center at
    /// (x0 + vx·k·dt, y0 + vy·k·dt) for step k.
    MovingEllipse {
        x0: f64,
        y0: f64,
        vx: f64,
        vy: f64,
        semi_x: f64,
        semi_y: f64,
        dt: f64,
    },
    /// g = normalᵀ·s + offset.
    StateHalfPlane { normal: DVector<f64>, offset: f64 },
    /// g = sign·u[index] − bound (upper bound: sign = 1, lower: sign = −1).
    ControlBound { index: usize, sign: f64, bound: f64 },
}

impl Constraint {
    pub fn depends_on_state(&self) -> bool {
        !matches!(self, Constraint::ControlBound { .. })
    }

    pub fn value(&self, k: usize, s: &DVector<f64>, u: Option<&DVector<f64>>) -> f64 {
        match self {
            Constraint::MovingEllipse {
                x0,
                y0,
                vx,
                vy,
                semi_x,
                semi_y,
                dt,
            } => {
                let t = k as f64 * dt;
                let dx = (s[0] - (x0 + vx * t)) / semi_x;
                let dy = (s[1] - (y0 + vy * t)) / semi_y;
                1.0 - dx * dx - dy * dy
            }
            Constraint::StateHalfPlane { normal, offset } => normal.dot(s) + offset,
            Constraint::ControlBound { index, sign, bound } => {
                sign * u.map_or(0.0, |u| u[*index]) - bound
            }
        }
    }

    /// ∂g/∂s; zero for control-only constraints.
    pub fn grad_state(&self, k: usize, s: &DVector<f64>) -> DVector<f64> {
        let n = s.len();
        match self {
            Constraint::MovingEllipse {
                x0,
                y0,
                vx,
                vy,
                semi_x,
                semi_y,
                dt,
            } => {
                let t = k as f64 * dt;
                let mut g = DVector::zeros(n);
                g[0] = -2.0 * (s[0] - (x0 + vx * t)) / (semi_x * semi_x);
                g[1] = -2.0 * (s[1] - (y0 + vy * t)) / (semi_y * semi_y);
                g
            }
            Constraint::StateHalfPlane { normal, .. } => normal.clone(),
            Constraint::ControlBound { .. } => DVector::zeros(n),
        }
    }

    /// ∂²g/∂s²; zero except for the ellipse.
    pub fn hess_state(&self, n: usize) -> DMatrix<f64> {
        match self {
            Constraint::MovingEllipse {
                semi_x, semi_y, ..
            } => {
                let mut h = DMatrix::zeros(n, n);
                h[(0, 0)] = -2.0 / (semi_x * semi_x);
                h[(1, 1)] = -2.0 / (semi_y * semi_y);
                h
            }
            _ => DMatrix::zeros(n, n),
        }
    }

    /// ∂g/∂u; zero for state-only constraints.
    pub fn grad_control(&self, m: usize) -> DVector<f64> {
        match self {
            Constraint::ControlBound { index, sign, .. } => {
                let mut g = DVector::zeros(m);
                g[*index] = *sign;
                g
            }
            _ => DVector::zeros(m),
        }
    }
}

/// The constraint set plus barrier shape parameters.
#[derive(Clone, Debug)]
pub struct ConstraintSpec {
    pub constraints: Vec<Constraint>,
    pub barrier_q1: f64,
    pub barrier_q2: f64,
}

impl ConstraintSpec {
    pub fn unconstrained() -> Self {
        Self {
            constraints: Vec::new(),
            barrier_q1: 1.0,
            barrier_q2: 5.0,
        }
    }

    pub fn new(constraints: Vec<Constraint>, barrier_q1: f64, barrier_q2: f64) -> Self {
        assert!(barrier_q1 > 0.0 && barrier_q2 > 0.0);
        Self {
            constraints,
            barrier_q1,
            barrier_q2,
        }
    }

    /// Symmetric upper/lower bounds on one control channel.
    pub fn control_box(index: usize, limit: f64) -> [Constraint; 2] {
        [
            Constraint::ControlBound {
                index,
                sign: 1.0,
                bound: limit,
            },
            Constraint::ControlBound {
                index,
                sign: -1.0,
                bound: limit,
            },
        ]
    }

    /// Largest raw constraint value over a whole trajectory (negative means
    /// strictly feasible). Stage constraints see (s_k, u_k); state-dependent
    /// constraints are also checked at the terminal state.
    pub fn max_violation(&self, traj: &crate::trajectory::Trajectory) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for k in 0..traj.horizon() {
            for c in &self.constraints {
                worst = worst.max(c.value(k, &traj.states[k], Some(&traj.controls[k])));
            }
        }
        let n = traj.horizon();
        for c in &self.constraints {
            if c.depends_on_state() {
                worst = worst.max(c.value(n, &traj.states[n], None));
            }
        }
        if self.constraints.is_empty() {
            f64::NEG_INFINITY
        } else {
            worst
        }
    }
}
