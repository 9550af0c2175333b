//! Vehicle state, actuator-limited actions, and the kinematic bicycle step.

use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Longitudinal acceleration limit (m/s^2).
pub const MAX_ACCEL: f64 = 5.5;
/// Front-wheel steering limit (rad).
pub const MAX_STEER: f64 = 1.0;
/// Speed ceiling (m/s); the floor is 0 (no reversing).
pub const MAX_SPEED: f64 = 60.0;

/// Distance from the center of mass to front/rear axle (m).
pub const WHEELBASE_FRONT: f64 = 2.5;
pub const WHEELBASE_REAR: f64 = 2.5;

/// Internal integration substep (s). The control step is integrated with
/// forward Euler at this resolution, which keeps single-step error against a
/// high-resolution reference below 1e-4 m at highway speeds.
pub const INTEGRATION_SUBSTEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    /// Longitudinal position in the global frame (m).
    pub x: f64,
    /// Lateral position in the global frame (m).
    pub y: f64,
    /// Scalar speed (m/s), always >= 0.
    pub speed: f64,
    /// Yaw angle in the global frame (rad).
    pub heading: f64,
    /// Body length (m).
    pub length: f64,
    /// Body width (m).
    pub width: f64,
    /// Lane index the vehicle is assigned to.
    pub lane_id: usize,
    /// Nominal travel direction along x: +1 or -1.
    pub direction: i8,
}

impl VehicleState {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.speed.is_finite()
            && self.heading.is_finite()
            && self.length.is_finite()
            && self.width.is_finite()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !self.is_finite() {
            return Err(SimError::NonFiniteState(format!("{self:?}")));
        }
        if self.length <= 0.0 || self.width <= 0.0 {
            return Err(SimError::NonFiniteState(format!(
                "non-positive body dimensions: {self:?}"
            )));
        }
        if self.direction != 1 && self.direction != -1 {
            return Err(SimError::NonFiniteState(format!(
                "direction must be +1 or -1: {self:?}"
            )));
        }
        Ok(())
    }

    /// Velocity components in the global frame.
    pub fn velocity(&self) -> (f64, f64) {
        (
            self.speed * self.heading.cos(),
            self.speed * self.heading.sin(),
        )
    }

    /// Body corners in the global frame, counterclockwise.
    pub fn corners(&self) -> [(f64, f64); 4] {
        let (sin, cos) = self.heading.sin_cos();
        let hl = self.length / 2.0;
        let hw = self.width / 2.0;
        let rot = |dx: f64, dy: f64| (self.x + dx * cos - dy * sin, self.y + dx * sin + dy * cos);
        [rot(hl, hw), rot(-hl, hw), rot(-hl, -hw), rot(hl, -hw)]
    }
}

/// Longitudinal acceleration and steering command, clamped to actuator
/// limits on construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Action {
    accel: f64,
    steer: f64,
}

impl Action {
    pub fn new(accel: f64, steer: f64) -> Self {
        Self {
            accel: accel.clamp(-MAX_ACCEL, MAX_ACCEL),
            steer: steer.clamp(-MAX_STEER, MAX_STEER),
        }
    }

    pub fn zero() -> Self {
        Self {
            accel: 0.0,
            steer: 0.0,
        }
    }

    pub fn accel(&self) -> f64 {
        self.accel
    }

    pub fn steer(&self) -> f64 {
        self.steer
    }

    pub fn is_finite(&self) -> bool {
        self.accel.is_finite() && self.steer.is_finite()
    }
}

/// Slip angle of the kinematic bicycle for a given steering angle.
pub fn slip_angle(steer: f64) -> f64 {
    (WHEELBASE_REAR * steer.tan() / (WHEELBASE_FRONT + WHEELBASE_REAR)).atan()
}

/// Advances the state one control step of `dt` seconds under the kinematic
/// bicycle model, integrating with forward Euler substeps. Speed is clamped
/// to [0, MAX_SPEED] after every substep.
pub fn step_ego_kinematics(
    state: &VehicleState,
    action: Action,
    dt: f64,
) -> Result<VehicleState, SimError> {
    state.validate()?;
    assert!(dt > 0.0, "dt must be positive");

    let slip = slip_angle(action.steer());
    let (sin_slip, _) = slip.sin_cos();
    let substeps = (dt / INTEGRATION_SUBSTEP).ceil().max(1.0) as usize;
    let h = dt / substeps as f64;

    let mut next = *state;
    for _ in 0..substeps {
        let (sin_course, cos_course) = (next.heading + slip).sin_cos();
        next.x += next.speed * cos_course * h;
        next.y += next.speed * sin_course * h;
        next.heading += next.speed * sin_slip / WHEELBASE_REAR * h;
        next.speed = (next.speed + action.accel() * h).clamp(0.0, MAX_SPEED);
    }
    Ok(next)
}
