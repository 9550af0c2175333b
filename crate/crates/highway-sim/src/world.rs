//! World state and the per-step update: ego kinematics, IDM/MOBIL traffic,
//! collision detection, reward, and termination.

use serde::{Deserialize, Serialize};

use crate::collision::{detect_collisions, CollisionEvent};
use crate::config::ScenarioConfig;
use crate::error::SimError;
use crate::idm::idm_acceleration;
use crate::mobil::{mobil_decision, LaneContext, MobilContext, MobilFollower, MobilVehicle};
use crate::observation::{build_observation, Observation};
use crate::profile::{DriverKind, DriverProfile};
use crate::reward::{compute_reward, RewardWeights, StepFlags};
use crate::road::RoadSpec;
use crate::vehicle::{step_ego_kinematics, Action, VehicleState, MAX_SPEED};

/// NPC lane-change lateral speed (m/s): a 4 m lane takes 2 s to cross.
const LANE_CHANGE_RATE: f64 = 2.0;
/// NPCs reconsider lane changes once per simulated second.
const MOBIL_PERIOD_STEPS: usize = 100;

/// A traffic vehicle with its behavior profile and lane-change progress.
#[derive(Clone, Debug, PartialEq)]
pub struct Npc {
    pub state: VehicleState,
    pub profile: DriverProfile,
    pub kind: DriverKind,
    /// Current lateral velocity (m/s); nonzero only mid lane change.
    pub lateral_rate: f64,
    /// Lane this NPC is moving into, if a change is underway.
    pub changing_to: Option<usize>,
}

impl Npc {
    pub fn new(state: VehicleState, profile: DriverProfile, kind: DriverKind) -> Self {
        Self {
            state,
            profile,
            kind,
            lateral_rate: 0.0,
            changing_to: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationReason {
    Running,
    VehicleCollision,
    BoundaryCollision,
    Destination,
    Timeout,
}

impl TerminationReason {
    pub fn label(&self) -> &'static str {
        match self {
            TerminationReason::Running => "running",
            TerminationReason::VehicleCollision => "vehicle_collision",
            TerminationReason::BoundaryCollision => "boundary_collision",
            TerminationReason::Destination => "destination",
            TerminationReason::Timeout => "timeout",
        }
    }
}

/// Result of one control step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub reason: TerminationReason,
    /// Collision events raised this step (ego-involved only).
    pub events: Vec<CollisionEvent>,
}

/// Full simulation state. Built by `spawn_traffic` or a scripted scenario,
/// advanced one control period at a time by `step`.
#[derive(Clone, Debug)]
pub struct World {
    config: ScenarioConfig,
    reward_weights: RewardWeights,
    ego: VehicleState,
    npcs: Vec<Npc>,
    step_count: usize,
    reason: TerminationReason,
}

impl World {
    pub fn from_parts(config: ScenarioConfig, ego: VehicleState, npcs: Vec<Npc>) -> Self {
        Self {
            config,
            reward_weights: RewardWeights::default(),
            ego,
            npcs,
            step_count: 0,
            reason: TerminationReason::Running,
        }
    }

    pub fn with_reward_weights(mut self, weights: RewardWeights) -> Self {
        self.reward_weights = weights;
        self
    }

    pub fn ego(&self) -> &VehicleState {
        &self.ego
    }

    pub fn npcs(&self) -> &[Npc] {
        &self.npcs
    }

    pub fn road(&self) -> &RoadSpec {
        &self.config.road
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn reward_weights(&self) -> &RewardWeights {
        &self.reward_weights
    }

    pub fn dt(&self) -> f64 {
        self.config.dt
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn reason(&self) -> TerminationReason {
        self.reason
    }

    pub fn is_done(&self) -> bool {
        self.reason != TerminationReason::Running
    }

    /// Observation of the current state.
    pub fn observe(&self) -> Observation {
        build_observation(self, self.config.observed_vehicles)
    }

    /// Longitudinal coordinate projected onto a travel direction: larger
    /// values are farther ahead for that direction.
    fn along(dir: i8, x: f64) -> f64 {
        dir as f64 * x
    }

    /// Nearest leader of `npc` among other NPCs and the ego; returns
    /// (leader speed along npc's direction, bumper gap).
    fn leader_of(&self, idx: usize) -> Option<(f64, f64)> {
        let me = &self.npcs[idx].state;
        let s_me = Self::along(me.direction, me.x);
        let mut best: Option<(f64, f64, f64)> = None; // (s, speed, length)

        for (j, other) in self.npcs.iter().enumerate() {
            if j == idx
                || other.state.lane_id != me.lane_id
                || other.state.direction != me.direction
            {
                continue;
            }
            let s = Self::along(me.direction, other.state.x);
            if s > s_me && best.is_none_or(|(bs, _, _)| s < bs) {
                best = Some((s, other.state.speed, other.state.length));
            }
        }

        // The ego is a leader for same-direction NPCs; oncoming NPCs do not
        // react to it (they hold their lane and expect it to yield).
        if me.direction == self.ego.direction {
            let ego_lane = self.config.road.lane_at(self.ego.y);
            if ego_lane == me.lane_id {
                let s = Self::along(me.direction, self.ego.x);
                if s > s_me && best.is_none_or(|(bs, _, _)| s < bs) {
                    let ego_long_speed = self.ego.speed * self.ego.heading.cos()
                        * me.direction as f64;
                    best = Some((s, ego_long_speed.max(0.0), self.ego.length));
                }
            }
        }

        best.map(|(s, speed, length)| {
            let gap = (s - s_me) - (length + me.length) / 2.0;
            (speed, gap)
        })
    }

    fn mobil_vehicle(state: &VehicleState, dir: i8) -> MobilVehicle {
        MobilVehicle {
            center: Self::along(dir, state.x),
            speed: state.speed,
            length: state.length,
        }
    }

    /// Leader/follower context of `lane` relative to position `s_me`,
    /// excluding NPC `skip`. The ego participates as an ordinary vehicle.
    fn lane_context(&self, lane: usize, dir: i8, s_me: f64, skip: usize) -> LaneContext {
        let mut leader: Option<(f64, MobilVehicle)> = None;
        let mut follower: Option<(f64, MobilFollower)> = None;
        let mut consider = |s: f64, v: MobilVehicle, profile: DriverProfile| {
            if s > s_me {
                if leader.is_none_or(|(bs, _)| s < bs) {
                    leader = Some((s, v));
                }
            } else if s < s_me && follower.as_ref().is_none_or(|(bs, _)| s > *bs) {
                follower = Some((s, MobilFollower {
                    vehicle: v,
                    profile,
                }));
            }
        };
        for (j, other) in self.npcs.iter().enumerate() {
            if j == skip || other.state.lane_id != lane || other.state.direction != dir {
                continue;
            }
            let s = Self::along(dir, other.state.x);
            consider(s, Self::mobil_vehicle(&other.state, dir), other.profile);
        }
        if self.ego.direction == dir && self.config.road.lane_at(self.ego.y) == lane {
            let s = Self::along(dir, self.ego.x);
            // The ego has no IDM profile; model it as a Normal driver for
            // the politeness term.
            consider(
                s,
                Self::mobil_vehicle(&self.ego, dir),
                DriverProfile::preset(DriverKind::Normal),
            );
        }
        LaneContext {
            leader: leader.map(|(_, v)| v),
            follower: follower.map(|(_, f)| f),
        }
    }

    /// Advances the world by one control period under `action`.
    pub fn step(&mut self, action: Action) -> Result<StepOutcome, SimError> {
        if self.is_done() {
            return Err(SimError::EpisodeOver);
        }
        if !action.is_finite() {
            return Err(SimError::NonFiniteAction {
                step: self.step_count,
                accel: action.accel(),
                steer: action.steer(),
            });
        }
        let dt = self.config.dt;
        let prev_speed = self.ego.speed;

        // Traffic decisions from the pre-step snapshot.
        let accels: Vec<f64> = (0..self.npcs.len())
            .map(|i| {
                let npc = &self.npcs[i];
                match self.leader_of(i) {
                    Some((leader_speed, gap)) => {
                        idm_acceleration(&npc.profile, npc.state.speed, leader_speed, gap)
                    }
                    None => idm_acceleration(&npc.profile, npc.state.speed, 0.0, f64::INFINITY),
                }
            })
            .collect();

        let mut lane_changes: Vec<(usize, usize)> = Vec::new();
        if self.step_count.is_multiple_of(MOBIL_PERIOD_STEPS) {
            for i in 0..self.npcs.len() {
                let npc = &self.npcs[i];
                if npc.changing_to.is_some() {
                    continue;
                }
                let dir = npc.state.direction;
                let s_me = Self::along(dir, npc.state.x);
                for target in self.config.road.same_direction_neighbors(npc.state.lane_id) {
                    let ctx = MobilContext {
                        ego: Self::mobil_vehicle(&npc.state, dir),
                        ego_profile: npc.profile,
                        current: self.lane_context(npc.state.lane_id, dir, s_me, i),
                        target: self.lane_context(target, dir, s_me, i),
                    };
                    if mobil_decision(&ctx) {
                        lane_changes.push((i, target));
                        break;
                    }
                }
            }
        }

        // Advance the ego.
        self.ego = step_ego_kinematics(&self.ego, action, dt)?;
        self.ego.lane_id = self.config.road.lane_at(self.ego.y);

        // Advance NPCs: longitudinal IDM, lateral lane-change slew.
        for (i, target) in lane_changes {
            self.npcs[i].changing_to = Some(target);
        }
        for (npc, accel) in self.npcs.iter_mut().zip(accels) {
            let dir = npc.state.direction as f64;
            npc.state.x += dir * npc.state.speed * dt;
            npc.state.speed = (npc.state.speed + accel * dt).clamp(0.0, MAX_SPEED);
            if let Some(target) = npc.changing_to {
                let target_y = self.config.road.lane_center(target);
                let dy = target_y - npc.state.y;
                if dy.abs() <= LANE_CHANGE_RATE * dt {
                    npc.state.y = target_y;
                    npc.state.lane_id = target;
                    npc.lateral_rate = 0.0;
                    npc.changing_to = None;
                } else {
                    npc.lateral_rate = LANE_CHANGE_RATE * dy.signum();
                    npc.state.y += npc.lateral_rate * dt;
                }
            }
        }
        self.step_count += 1;

        // Termination: collisions win over destination, destination over timeout.
        let events = detect_collisions(self);
        let vehicle_hit = events
            .iter()
            .any(|e| matches!(e, CollisionEvent::Vehicle { .. }));
        let boundary_hit = events.iter().any(|e| matches!(e, CollisionEvent::Boundary));
        let destination = if self.ego.direction == 1 {
            self.ego.x >= self.config.road.length
        } else {
            self.ego.x <= 0.0
        };
        self.reason = if vehicle_hit {
            TerminationReason::VehicleCollision
        } else if boundary_hit {
            TerminationReason::BoundaryCollision
        } else if destination {
            TerminationReason::Destination
        } else if self.step_count >= self.config.max_steps {
            TerminationReason::Timeout
        } else {
            TerminationReason::Running
        };

        let reward = compute_reward(
            prev_speed,
            &action,
            StepFlags {
                collision: vehicle_hit || boundary_hit,
                destination: self.reason == TerminationReason::Destination,
            },
            &self.reward_weights,
        );

        Ok(StepOutcome {
            observation: self.observe(),
            reward,
            done: self.is_done(),
            reason: self.reason,
            events,
        })
    }
}
