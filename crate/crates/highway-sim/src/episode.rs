//! Episode driver: runs a policy against a world and records the trace.

use std::time::Instant;

use crate::error::SimError;
use crate::observation::Observation;
use crate::vehicle::{Action, VehicleState};
use crate::world::{TerminationReason, World};

/// A controller for the ego vehicle. `act` receives both the structured
/// observation (what a learned policy consumes) and the full world (what a
/// model-based planner needs).
pub trait Policy {
    fn act(&mut self, world: &World, observation: &Observation) -> Action;

    /// Label of the controller's internal mode, when it has one.
    fn mode_label(&self) -> Option<&'static str> {
        None
    }

    /// Clears internal state (integrators, cached plans) between episodes.
    fn reset(&mut self) {}
}

/// One executed control step: the action applied, the resulting ego state,
/// and the reward received.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub state: VehicleState,
    pub action: Action,
    pub reward: f64,
    pub mode: Option<&'static str>,
}

/// Full record of one episode.
#[derive(Clone, Debug)]
pub struct EpisodeTrace {
    pub initial: VehicleState,
    pub steps: Vec<StepRecord>,
    pub reason: TerminationReason,
    /// Wall-clock seconds spent inside `policy.act` per step. Kept separate
    /// from the step records so trace comparisons stay deterministic.
    pub decision_times: Vec<f64>,
}

impl EpisodeTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }

    /// CSV with one row per timestep. Row 0 is the initial state (no action
    /// or reward); the final row carries the termination reason. Floats use
    /// shortest round-trip formatting, so parsing yields bit-equal values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,x,y,speed,heading,accel,steer,reward,mode,reason\n");
        out.push_str(&format!(
            "0,{},{},{},{},,,,,\n",
            self.initial.x, self.initial.y, self.initial.speed, self.initial.heading
        ));
        for (i, rec) in self.steps.iter().enumerate() {
            let reason = if i + 1 == self.steps.len() {
                self.reason.label()
            } else {
                ""
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                rec.step,
                rec.state.x,
                rec.state.y,
                rec.state.speed,
                rec.state.heading,
                rec.action.accel(),
                rec.action.steer(),
                rec.reward,
                rec.mode.unwrap_or(""),
                reason
            ));
        }
        out
    }
}

/// Extracts the applied action sequence from a trace CSV, for replay.
pub fn actions_from_csv(text: &str) -> Result<Vec<Action>, SimError> {
    let mut actions = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.is_empty() {
            continue; // header
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(SimError::MalformedTrace(format!(
                "line {}: expected 10 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        if fields[0] == "0" {
            continue; // initial-state row has no action
        }
        let parse = |s: &str, name: &str| -> Result<f64, SimError> {
            s.parse::<f64>().map_err(|_| {
                SimError::MalformedTrace(format!("line {}: bad {name} '{s}'", lineno + 1))
            })
        };
        let accel = parse(fields[5], "accel")?;
        let steer = parse(fields[6], "steer")?;
        actions.push(Action::new(accel, steer));
    }
    Ok(actions)
}

/// Runs `policy` on `world` until termination, returning the full trace.
/// The world's configured `max_steps` bounds the loop.
pub fn run_episode(policy: &mut dyn Policy, world: &mut World) -> Result<EpisodeTrace, SimError> {
    policy.reset();
    let initial = *world.ego();
    let mut steps = Vec::new();
    let mut decision_times = Vec::new();
    let mut observation = world.observe();
    loop {
        let started = Instant::now();
        let action = policy.act(world, &observation);
        decision_times.push(started.elapsed().as_secs_f64());

        let outcome = world.step(action)?;
        steps.push(StepRecord {
            step: world.step_count(),
            state: *world.ego(),
            action,
            reward: outcome.reward,
            mode: policy.mode_label(),
        });
        observation = outcome.observation;
        if outcome.done {
            return Ok(EpisodeTrace {
                initial,
                steps,
                reason: outcome.reason,
                decision_times,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;
    use crate::spawn::spawn_traffic;

    struct Constant(Action);
    impl Policy for Constant {
        fn act(&mut self, _world: &World, _obs: &Observation) -> Action {
            self.0
        }
    }

    struct BadPolicy;
    impl Policy for BadPolicy {
        fn act(&mut self, _world: &World, _obs: &Observation) -> Action {
            Action::new(f64::NAN, 0.0)
        }
    }

    fn quiet_config() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.traffic.same_direction_spacing = 5000.0;
        cfg.traffic.opposing_spacing = 5000.0;
        cfg
    }

    #[test]
    fn coasting_episode_trace_is_complete() {
        let mut world = spawn_traffic(&quiet_config(), 0).unwrap();
        let mut policy = Constant(Action::zero());
        let trace = run_episode(&mut policy, &mut world).unwrap();
        assert_eq!(trace.reason, TerminationReason::Destination);
        assert_eq!(trace.decision_times.len(), trace.len());
        assert_eq!(trace.steps.last().unwrap().step, trace.len());
        assert_eq!(trace.initial.x, 5.0);
        // Reward accumulates the full-speed incentive each step.
        assert!(trace.total_reward() > 100.0);
    }

    #[test]
    fn non_finite_policy_aborts() {
        let mut world = spawn_traffic(&quiet_config(), 0).unwrap();
        let err = run_episode(&mut BadPolicy, &mut world).unwrap_err();
        assert!(matches!(err, SimError::NonFiniteAction { step: 0, .. }));
    }

    #[test]
    fn csv_round_trips_actions_exactly() {
        let mut world = spawn_traffic(&quiet_config(), 0).unwrap();
        let mut policy = Constant(Action::new(0.12345678901234567, 0.0));
        let trace = run_episode(&mut policy, &mut world).unwrap();
        let csv = trace.to_csv();
        let actions = actions_from_csv(&csv).unwrap();
        assert_eq!(actions.len(), trace.len());
        for (a, rec) in actions.iter().zip(&trace.steps) {
            assert_eq!(a.accel().to_bits(), rec.action.accel().to_bits());
            assert_eq!(a.steer().to_bits(), rec.action.steer().to_bits());
        }
        // Header plus initial row plus one row per step.
        assert_eq!(csv.lines().count(), trace.len() + 2);
        let last = csv.lines().last().unwrap();
        assert!(last.ends_with(",destination"));
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(actions_from_csv("step,x\n1,2\n").is_err());
        let bad = "step,x,y,speed,heading,accel,steer,reward,mode,reason\n1,0,0,0,0,abc,0,0,,\n";
        assert!(actions_from_csv(bad).is_err());
    }
}
