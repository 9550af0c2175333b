//! Scripted scenarios with seed-controlled jitter, used for controller
//! validation: an empty road, a slow leader to overtake, and an overtake
//! that must be aborted for oncoming traffic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ScenarioConfig;
use crate::profile::{DriverKind, DriverProfile};
use crate::vehicle::VehicleState;
use crate::world::{Npc, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScriptedScenario {
    /// No traffic at all; the ego just drives to the end.
    EmptyRoad,
    /// A slow truck blocks the ego's lane; the oncoming lane stays clear.
    SlowLeader,
    /// A slow truck plus an oncoming car timed to interrupt the overtake.
    OvertakeAbort,
}

impl ScriptedScenario {
    pub const ALL: [ScriptedScenario; 3] = [
        ScriptedScenario::EmptyRoad,
        ScriptedScenario::SlowLeader,
        ScriptedScenario::OvertakeAbort,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ScriptedScenario::EmptyRoad => "empty_road",
            ScriptedScenario::SlowLeader => "slow_leader",
            ScriptedScenario::OvertakeAbort => "overtake_abort",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|s| s.label() == label)
    }

    /// Builds the scenario world with the default configuration.
    pub fn build(&self, seed: u64) -> World {
        self.build_with(&ScenarioConfig::default(), seed)
    }

    /// Builds the scenario world. The seed jitters start positions and
    /// speeds; identical (config, seed) pairs give identical worlds.
    pub fn build_with(&self, config: &ScenarioConfig, seed: u64) -> World {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut uniform = |lo: f64, hi: f64| lo + (hi - lo) * rng.gen::<f64>();
        let road = &config.road;

        let ego = VehicleState {
            x: config.ego.start_x + uniform(-3.0, 3.0),
            y: road.lane_center(config.ego.start_lane),
            speed: (config.ego.start_speed + uniform(-2.0, 2.0)).max(0.0),
            heading: 0.0,
            length: config.ego.length,
            width: config.ego.width,
            lane_id: config.ego.start_lane,
            direction: road.direction_of(config.ego.start_lane),
        };

        let mut npcs = Vec::new();
        match self {
            ScriptedScenario::EmptyRoad => {}
            ScriptedScenario::SlowLeader => {
                // A truck capped well below the ego's speed, far enough
                // ahead that the ego approaches at speed.
                let mut profile = DriverProfile::preset(DriverKind::Truck);
                profile.desired_speed = 12.0;
                let x = ego.x + 105.0 + uniform(-10.0, 10.0);
                npcs.push(Npc::new(
                    VehicleState {
                        x,
                        y: road.lane_center(0),
                        speed: profile.desired_speed,
                        heading: 0.0,
                        length: profile.length,
                        width: profile.width,
                        lane_id: 0,
                        direction: 1,
                    },
                    profile,
                    DriverKind::Truck,
                ));
            }
            ScriptedScenario::OvertakeAbort => {
                // The truck sits far enough out that the ego commits to a
                // pass at speed, and fast enough (20 m/s) that completing
                // the pass takes long enough for the oncoming car to close.
                let mut profile = DriverProfile::preset(DriverKind::Truck);
                profile.desired_speed = 20.0;
                let x = ego.x + 230.0 + uniform(-10.0, 10.0);
                npcs.push(Npc::new(
                    VehicleState {
                        x,
                        y: road.lane_center(0),
                        speed: profile.desired_speed,
                        heading: 0.0,
                        length: profile.length,
                        width: profile.width,
                        lane_id: 0,
                        direction: 1,
                    },
                    profile,
                    DriverKind::Truck,
                ));
                // Oncoming car timed to close the passing window only after
                // the ego has already moved into the opposing lane.
                let oncoming = DriverProfile::preset(DriverKind::Timid);
                let x = 791.0 + uniform(-15.0, 15.0);
                npcs.push(Npc::new(
                    VehicleState {
                        x,
                        y: road.lane_center(1),
                        speed: oncoming.desired_speed,
                        heading: std::f64::consts::PI,
                        length: oncoming.length,
                        width: oncoming.width,
                        lane_id: 1,
                        direction: -1,
                    },
                    oncoming,
                    DriverKind::Timid,
                ));
            }
        }
        World::from_parts(config.clone(), ego, npcs)
    }
}
