//! Tunable parameters of the scripted driver.

use cilqr::PlannerSettings;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpertConfig {
    /// Cruise speed the driver tries to hold (m/s).
    pub desired_speed: f64,
    /// Control steps between plan refreshes; one planner step long so the
    /// executed control always matches the plan's own discretization.
    pub replan_period_steps: usize,
    /// Cross-track gain of the fallback steering law.
    pub cross_track_gain: f64,
    /// Gap-tracking PID gains (kp, ki, kd) for car following.
    pub accel_gains: (f64, f64, f64),
    /// Deceleration used when backing out of a pass (m/s², negative).
    pub merge_brake: f64,
    /// Acceleration used when finishing a pass ahead of traffic (m/s²).
    pub merge_boost: f64,
    /// How far from the lane center a plan may end and still count as
    /// settled on that lane (m).
    pub lane_center_tolerance: f64,
    /// Half-width of the band around a lane center within which a plan
    /// still counts as staying in that lane (m).
    pub in_lane_tolerance: f64,
    /// How much slower than the cruise speed a plan may end and still
    /// count as keeping pace (m/s).
    pub max_speed_deficit: f64,
    /// Longitudinal window (behind, ahead of the ego, in meters) in which a
    /// home-lane vehicle blocks targeting the home lane: no cutting in
    /// right next to the vehicle being passed.
    pub alongside_behind: f64,
    pub alongside_ahead: f64,
    /// Clearance (m) required behind/ahead in a lane before the fallback
    /// modes steer into it.
    pub merge_clear_behind: f64,
    pub merge_clear_ahead: f64,
    /// Reaction time (s) and comfortable deceleration (m/s²) used to size
    /// the "still behind the obstruction" lookahead.
    pub reaction_time: f64,
    pub comfortable_decel: f64,
    /// Lateral-acceleration budget (m/s²) that caps fallback steering.
    pub max_lateral_accel: f64,
    pub planner: PlannerSettings,
}

impl Default for ExpertConfig {
    fn default() -> Self {
        Self {
            desired_speed: 45.0,
            replan_period_steps: 10,
            cross_track_gain: 1.0,
            accel_gains: (0.5, 0.0, 0.3),
            merge_brake: -5.0,
            merge_boost: 3.0,
            lane_center_tolerance: 1.0,
            in_lane_tolerance: 1.5,
            max_speed_deficit: 10.0,
            alongside_behind: 20.0,
            alongside_ahead: 20.0,
            merge_clear_behind: 10.0,
            merge_clear_ahead: 15.0,
            reaction_time: 1.0,
            comfortable_decel: 4.0,
            max_lateral_accel: 8.0,
            planner: PlannerSettings::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_json() {
        let config = ExpertConfig::default();
        let text = serde_json::to_string(&config).unwrap();
        let back: ExpertConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.desired_speed, config.desired_speed);
        assert_eq!(back.replan_period_steps, config.replan_period_steps);
        assert_eq!(back.planner.horizon, config.planner.horizon);
    }

    #[test]
    fn missing_fields_take_defaults() {
        let config: ExpertConfig = serde_json::from_str("{\"desired_speed\": 40.0}").unwrap();
        assert_eq!(config.desired_speed, 40.0);
        assert_eq!(config.merge_brake, -5.0);
        assert_eq!(config.planner.horizon, 50);
    }
}
