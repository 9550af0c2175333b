//! Deterministic two-lane highway simulation: kinematic bicycle ego,
//! IDM/MOBIL traffic, collision detection, observations, and rewards.

pub mod collision;
pub mod config;
pub mod episode;
pub mod error;
pub mod idm;
pub mod mobil;
pub mod observation;
pub mod profile;
pub mod reward;
pub mod road;
pub mod scenario;
pub mod spawn;
pub mod vehicle;
pub mod world;

pub use collision::{detect_collisions, rectangles_overlap, CollisionEvent};
pub use config::{EgoConfig, MixtureWeights, ScenarioConfig, TrafficConfig};
pub use episode::{run_episode, EpisodeTrace, Policy, StepRecord};
pub use error::SimError;
pub use idm::idm_acceleration;
pub use mobil::{mobil_decision, LaneContext, MobilContext, MobilFollower, MobilVehicle};
pub use observation::{build_observation, ObsRow, Observation};
pub use profile::{DriverKind, DriverProfile};
pub use reward::{compute_reward, RewardWeights, StepFlags};
pub use road::RoadSpec;
pub use scenario::ScriptedScenario;
pub use spawn::spawn_traffic;
pub use vehicle::{step_ego_kinematics, Action, VehicleState, MAX_ACCEL, MAX_SPEED, MAX_STEER};
pub use world::{Npc, StepOutcome, TerminationReason, World};
