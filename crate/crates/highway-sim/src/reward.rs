//! Step reward: collision penalty, speed incentive, control effort, prize.

use serde::{Deserialize, Serialize};

use crate::vehicle::Action;

/// Linear weights on the five reward components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    /// Collision indicator weight (negative).
    pub c1: f64,
    /// Speed incentive weight.
    pub c2: f64,
    /// Steering effort weight (applied to -steer^2).
    pub c3: f64,
    /// Acceleration effort weight (applied to -accel^2).
    pub c4: f64,
    /// Destination prize weight.
    pub c5: f64,
    /// Speed mapped to 0 incentive at or below this (m/s).
    pub v_min: f64,
    /// Speed mapped to full incentive at or above this (m/s).
    pub v_max: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            c1: -10.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            c5: 100.0,
            v_min: 20.0,
            v_max: 60.0,
        }
    }
}

/// Terminal-event flags for the step being scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFlags {
    pub collision: bool,
    pub destination: bool,
}

/// Reward for one control step. `speed` is the ego speed when the action was
/// issued; steering and acceleration penalties are quadratic in the applied
/// commands.
pub fn compute_reward(
    speed: f64,
    action: &Action,
    flags: StepFlags,
    weights: &RewardWeights,
) -> f64 {
    let r_vel = ((speed - weights.v_min) / (weights.v_max - weights.v_min)).clamp(0.0, 1.0);
    let r_col = if flags.collision { 1.0 } else { 0.0 };
    let r_dst = if flags.destination { 1.0 } else { 0.0 };
    weights.c1 * r_col
        + weights.c2 * r_vel
        + weights.c3 * (-action.steer() * action.steer())
        + weights.c4 * (-action.accel() * action.accel())
        + weights.c5 * r_dst
}
