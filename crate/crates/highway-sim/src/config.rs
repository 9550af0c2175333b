//! Scenario configuration: road, ego start, traffic density and mixture.

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::road::RoadSpec;

/// Fraction of each driver type in randomly spawned traffic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureWeights {
    pub normal: f64,
    pub timid: f64,
    pub aggressive: f64,
    pub truck: f64,
}

impl Default for MixtureWeights {
    fn default() -> Self {
        Self {
            normal: 0.6,
            timid: 0.2,
            aggressive: 0.1,
            truck: 0.1,
        }
    }
}

impl MixtureWeights {
    pub fn sum(&self) -> f64 {
        self.normal + self.timid + self.aggressive + self.truck
    }
}

/// Placement of randomly generated traffic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrafficConfig {
    /// Mean gap between consecutive vehicles sharing the ego's direction (m).
    pub same_direction_spacing: f64,
    /// Mean gap between consecutive oncoming vehicles (m).
    pub opposing_spacing: f64,
    /// Uniform jitter applied to each nominal position (m, +/-).
    pub position_jitter: f64,
    pub mixture: MixtureWeights,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            same_direction_spacing: 80.0,
            opposing_spacing: 180.0,
            position_jitter: 10.0,
            mixture: MixtureWeights::default(),
        }
    }
}

/// Ego vehicle start state and body size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EgoConfig {
    pub start_x: f64,
    pub start_speed: f64,
    pub length: f64,
    pub width: f64,
    /// Lane the ego starts in (its home lane).
    pub start_lane: usize,
}

impl Default for EgoConfig {
    fn default() -> Self {
        Self {
            start_x: 5.0,
            start_speed: 45.0,
            length: 5.0,
            width: 2.0,
            start_lane: 0,
        }
    }
}

/// Everything needed to build a reproducible episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub road: RoadSpec,
    #[serde(default)]
    pub ego: EgoConfig,
    #[serde(default)]
    pub traffic: TrafficConfig,
    /// Control period (s).
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Hard episode cap in control steps.
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Number of nearest vehicles reported in the observation.
    #[serde(default = "default_observed_vehicles")]
    pub observed_vehicles: usize,
}

fn default_dt() -> f64 {
    0.01
}

fn default_max_steps() -> usize {
    5000
}

fn default_observed_vehicles() -> usize {
    7
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            road: RoadSpec::default(),
            ego: EgoConfig::default(),
            traffic: TrafficConfig::default(),
            dt: default_dt(),
            max_steps: default_max_steps(),
            observed_vehicles: default_observed_vehicles(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !self.road.validate() {
            return Err(SimError::InvalidConfig("bad road geometry".into()));
        }
        if self.ego.start_lane >= self.road.lane_count() {
            return Err(SimError::InvalidConfig(format!(
                "ego start lane {} outside road with {} lanes",
                self.ego.start_lane,
                self.road.lane_count()
            )));
        }
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(SimError::InvalidConfig(format!("bad dt {}", self.dt)));
        }
        if self.max_steps == 0 {
            return Err(SimError::InvalidConfig("max_steps must be > 0".into()));
        }
        if self.observed_vehicles == 0 {
            return Err(SimError::InvalidConfig(
                "observed_vehicles must be > 0".into(),
            ));
        }
        let s = self.traffic.mixture.sum();
        if !(s.is_finite() && s > 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "mixture weights must sum to a positive value, got {s}"
            )));
        }
        if self.traffic.same_direction_spacing <= 0.0 || self.traffic.opposing_spacing <= 0.0 {
            return Err(SimError::InvalidConfig("spacing must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = ScenarioConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.dt, 0.01);
        assert_eq!(cfg.max_steps, 5000);
        assert_eq!(cfg.observed_vehicles, 7);
        assert_eq!(cfg.ego.start_speed, 45.0);
        assert_eq!(cfg.traffic.same_direction_spacing, 80.0);
        assert_eq!(cfg.traffic.opposing_spacing, 180.0);
    }

    #[test]
    fn mixture_defaults_sum_to_one() {
        let m = MixtureWeights::default();
        assert!((m.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_configs() {
        let cfg = ScenarioConfig {
            dt: 0.0,
            ..ScenarioConfig::default()
        };
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::default();
        cfg.ego.start_lane = 5;
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::default();
        cfg.traffic.mixture = MixtureWeights {
            normal: 0.0,
            timid: 0.0,
            aggressive: 0.0,
            truck: 0.0,
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = ScenarioConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: ScenarioConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
    }
}
