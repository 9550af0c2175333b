//! Seeded traffic generation: evenly spaced NPCs with jitter and a typed mix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ScenarioConfig;
use crate::error::SimError;
use crate::profile::{DriverKind, DriverProfile};
use crate::vehicle::VehicleState;
use crate::world::{Npc, World};

/// Minimum clear distance kept between a spawned NPC and the ego start (m).
const EGO_CLEARANCE: f64 = 25.0;

fn draw_kind(rng: &mut ChaCha8Rng, cfg: &ScenarioConfig) -> DriverKind {
    let m = cfg.traffic.mixture;
    let total = m.sum();
    let u: f64 = rng.gen::<f64>() * total;
    if u < m.normal {
        DriverKind::Normal
    } else if u < m.normal + m.timid {
        DriverKind::Timid
    } else if u < m.normal + m.timid + m.aggressive {
        DriverKind::Aggressive
    } else {
        DriverKind::Truck
    }
}

/// Populates a world from the scenario config: one NPC per nominal slot,
/// slots spaced by direction-dependent intervals, each jittered uniformly.
/// NPCs start at their profile's desired speed. Identical (config, seed)
/// pairs produce identical worlds.
pub fn spawn_traffic(config: &ScenarioConfig, seed: u64) -> Result<World, SimError> {
    config.validate()?;
    let road = &config.road;
    let ego_dir = road.direction_of(config.ego.start_lane);
    let ego = VehicleState {
        x: config.ego.start_x,
        y: road.lane_center(config.ego.start_lane),
        speed: config.ego.start_speed,
        heading: if ego_dir == 1 { 0.0 } else { std::f64::consts::PI },
        length: config.ego.length,
        width: config.ego.width,
        lane_id: config.ego.start_lane,
        direction: ego_dir,
    };
    ego.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut npcs = Vec::new();
    for lane in 0..road.lane_count() {
        let dir = road.direction_of(lane);
        let spacing = if dir == ego_dir {
            config.traffic.same_direction_spacing
        } else {
            config.traffic.opposing_spacing
        };
        let mut nominal = spacing;
        while nominal < road.length {
            let jitter = (2.0 * rng.gen::<f64>() - 1.0) * config.traffic.position_jitter;
            let x = nominal + jitter;
            let kind = draw_kind(&mut rng, config);
            let profile = DriverProfile::preset(kind);
            let too_close_to_ego =
                lane == config.ego.start_lane && (x - config.ego.start_x).abs() < EGO_CLEARANCE;
            if !too_close_to_ego {
                npcs.push(Npc::new(
                    VehicleState {
                        x,
                        y: road.lane_center(lane),
                        speed: profile.desired_speed,
                        heading: if dir == 1 { 0.0 } else { std::f64::consts::PI },
                        length: profile.length,
                        width: profile.width,
                        lane_id: lane,
                        direction: dir,
                    },
                    profile,
                    kind,
                ));
            }
            nominal += spacing;
        }
    }
    Ok(World::from_parts(config.clone(), ego, npcs))
}
