//! Training loop. The exploring actor collects experience while the
//! rule-based driver is queried (but not obeyed) at every visited state to
//! record what it would have done; those reference actions feed the actor's
//! imitation term, whose weight fades over the course of training.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use expert_system::ExpertPolicy;
use highway_sim::{
    run_episode, ObsRow, Policy, ScenarioConfig, ScriptedScenario, SimError, TerminationReason,
    World,
};

use crate::buffer::{ReplayBuffer, Transition};
use crate::fading::FadingSchedule;
use crate::nn::Mlp;
use crate::normalize::ObservationNormalizer;
use crate::td3::{to_action, to_normalized, Batch, BetaRule, GreedyActor, Td3Agent, Td3Config};

/// Traffic the training environment is populated with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvTraffic {
    EmptyRoad,
    SlowLeader,
    OvertakeAbort,
    /// Randomly spawned mixed traffic in both directions.
    Spawned,
}

impl EnvTraffic {
    pub fn label(&self) -> &'static str {
        match self {
            EnvTraffic::EmptyRoad => "empty_road",
            EnvTraffic::SlowLeader => "slow_leader",
            EnvTraffic::OvertakeAbort => "overtake_abort",
            EnvTraffic::Spawned => "spawned",
        }
    }

    pub fn build(&self, config: &ScenarioConfig, seed: u64) -> Result<World, SimError> {
        match self {
            EnvTraffic::EmptyRoad => Ok(ScriptedScenario::EmptyRoad.build_with(config, seed)),
            EnvTraffic::SlowLeader => Ok(ScriptedScenario::SlowLeader.build_with(config, seed)),
            EnvTraffic::OvertakeAbort => {
                Ok(ScriptedScenario::OvertakeAbort.build_with(config, seed))
            }
            EnvTraffic::Spawned => highway_sim::spawn_traffic(config, seed),
        }
    }
}

/// Everything a training run depends on. Serializing this struct captures
/// the run's full configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSetup {
    pub env: ScenarioConfig,
    pub traffic: EnvTraffic,
    pub td3: Td3Config,
    /// Initial imitation weight. None lets the first actor update pick the
    /// weight that balances the imitation term against the policy term.
    pub q1: Option<f64>,
    /// Decay rate of the imitation weight over the planned updates.
    pub q2: f64,
    pub total_steps: u64,
    pub seed: u64,
    /// Environment steps between greedy evaluations (0 disables them).
    pub eval_every: u64,
    pub eval_episodes: u32,
    /// With guidance off, the reference driver is never queried and the
    /// actor update has no imitation term at all.
    pub guided: bool,
}

impl Default for TrainSetup {
    fn default() -> Self {
        Self {
            env: ScenarioConfig::default(),
            traffic: EnvTraffic::Spawned,
            td3: Td3Config::default(),
            q1: None,
            q2: 4.0,
            total_steps: 50_000,
            seed: 0,
            eval_every: 5_000,
            eval_episodes: 3,
            guided: true,
        }
    }
}

impl TrainSetup {
    pub fn validate(&self) -> Result<(), String> {
        self.env.validate().map_err(|e| e.to_string())?;
        self.td3.validate()?;
        if self.total_steps == 0 {
            return Err("total_steps must be >= 1".into());
        }
        if !(self.q2.is_finite() && self.q2 >= 0.0) {
            return Err(format!("q2 must be finite and >= 0, got {}", self.q2));
        }
        if let Some(q1) = self.q1 {
            if !(q1.is_finite() && q1 >= 0.0) {
                return Err(format!("q1 must be finite and >= 0, got {q1}"));
            }
        }
        if self.eval_every > 0 && self.eval_episodes == 0 {
            return Err("eval_episodes must be >= 1 when evaluations are enabled".into());
        }
        Ok(())
    }

    /// Actor updates the fading schedule is stretched over: one per
    /// `policy_delay` critic updates across the post-warmup steps.
    pub fn planned_actor_updates(&self) -> u64 {
        (self
            .total_steps
            .saturating_sub(self.td3.warmup_steps)
            / self.td3.policy_delay)
            .max(1)
    }
}

/// One delayed actor update's losses and applied imitation weight.
#[derive(Clone, Debug, Serialize)]
pub struct UpdateRecord {
    pub env_step: u64,
    /// 0-based actor-update index (the schedule's time variable).
    pub actor_update: u64,
    pub beta: f64,
    pub policy_loss: f64,
    pub guidance_loss: Option<f64>,
    pub critic1_loss: f64,
    pub critic2_loss: f64,
}

/// One completed training episode.
#[derive(Clone, Debug, Serialize)]
pub struct EpisodeRecord {
    /// Environment step count when the episode ended.
    pub end_step: u64,
    pub reward: f64,
    pub steps: u64,
    pub reason: String,
}

/// Aggregate result of a batch of greedy evaluation episodes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EvalSummary {
    pub episodes: u32,
    pub mean_reward: f64,
    pub mean_steps: f64,
    pub destination_rate: f64,
    pub collision_rate: f64,
}

/// An evaluation summary pinned to the training step it was taken at.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EvalPoint {
    pub env_step: u64,
    pub mean_reward: f64,
    pub mean_steps: f64,
    pub destination_rate: f64,
    pub collision_rate: f64,
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training setup: {0}")]
    InvalidSetup(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("non-finite {quantity} at environment step {env_step}; aborting the run")]
    NonFinite { quantity: &'static str, env_step: u64 },
}

/// Everything a finished run hands back: the trained agent, the (possibly
/// absent) observation statistics, and the full training/evaluation logs.
pub struct TrainOutcome {
    pub agent: Td3Agent,
    pub normalizer: Option<ObservationNormalizer>,
    pub updates: Vec<UpdateRecord>,
    pub episodes: Vec<EpisodeRecord>,
    pub evals: Vec<EvalPoint>,
    /// The imitation weight the schedule started from; None when the run
    /// was unguided or never reached an actor update.
    pub q1_resolved: Option<f64>,
    pub planned_actor_updates: u64,
}

impl TrainOutcome {
    /// Freezes the trained actor (and observation statistics) into a
    /// deterministic controller.
    pub fn greedy_actor(&self) -> GreedyActor {
        GreedyActor {
            actor: self.agent.actor.clone(),
            normalizer: self.normalizer.clone(),
        }
    }
}

/// SplitMix64; derives evaluation world seeds that are decoupled from the
/// training RNG streams.
fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Timeouts truncate an episode without ending the task, so their value is
/// still bootstrapped; collisions and arrival are genuine terminals.
pub fn terminal_for_bootstrap(done: bool, reason: TerminationReason) -> bool {
    done && reason != TerminationReason::Timeout
}

/// Runs greedy evaluation episodes on freshly built worlds.
pub fn evaluate(
    actor: &Mlp,
    normalizer: Option<&ObservationNormalizer>,
    env: &ScenarioConfig,
    traffic: EnvTraffic,
    seeds: &[u64],
) -> Result<EvalSummary, SimError> {
    assert!(!seeds.is_empty());
    let mut policy = GreedyActor {
        actor: actor.clone(),
        normalizer: normalizer.cloned(),
    };
    let mut total_reward = 0.0;
    let mut total_steps = 0.0;
    let mut destinations = 0u32;
    let mut collisions = 0u32;
    for &seed in seeds {
        let mut world = traffic.build(env, seed)?;
        let trace = run_episode(&mut policy, &mut world)?;
        total_reward += trace.total_reward();
        total_steps += trace.len() as f64;
        match trace.reason {
            TerminationReason::Destination => destinations += 1,
            TerminationReason::VehicleCollision | TerminationReason::BoundaryCollision => {
                collisions += 1
            }
            _ => {}
        }
    }
    let n = seeds.len() as f64;
    Ok(EvalSummary {
        episodes: seeds.len() as u32,
        mean_reward: total_reward / n,
        mean_steps: total_steps / n,
        destination_rate: f64::from(destinations) / n,
        collision_rate: f64::from(collisions) / n,
    })
}

/// Runs one full training session. Two independent RNG streams make the
/// run reproducible: the agent stream (network init, exploration noise,
/// batch sampling, target smoothing noise) and the environment stream
/// (world seeds). Reference-driver queries consume no randomness, so a
/// guided run and an unguided run see identical streams.
pub fn train(setup: &TrainSetup) -> Result<TrainOutcome, TrainError> {
    setup.validate().map_err(TrainError::InvalidSetup)?;
    let mut agent_rng = ChaCha8Rng::seed_from_u64(setup.seed);
    let mut env_rng = ChaCha8Rng::seed_from_u64(setup.seed.wrapping_add(0x9E37_79B9_7F4A_7C15));

    let obs_dim = setup.env.observed_vehicles * ObsRow::WIDTH;
    let mut agent = Td3Agent::new(obs_dim, setup.td3.clone(), &mut agent_rng);
    let mut normalizer = if setup.td3.normalize_observations {
        Some(ObservationNormalizer::for_vehicle_rows(
            setup.env.observed_vehicles,
            ObsRow::WIDTH,
            setup.td3.observation_clip,
        ))
    } else {
        None
    };
    let mut buffer = ReplayBuffer::new(setup.td3.buffer_capacity);
    let mut expert = ExpertPolicy::default();

    let planned_updates = setup.planned_actor_updates();
    let mut schedule: Option<FadingSchedule> = match (setup.guided, setup.q1) {
        (true, Some(q1)) => Some(FadingSchedule::new(q1, setup.q2, planned_updates)),
        _ => None,
    };

    let mut updates = Vec::new();
    let mut episodes = Vec::new();
    let mut evals = Vec::new();

    let mut world = setup.traffic.build(&setup.env, env_rng.gen())?;
    let mut obs = world.observe();
    if let Some(n) = normalizer.as_mut() {
        n.update(&obs.flatten());
    }
    let mut episode_reward = 0.0;
    let mut episode_steps = 0u64;

    for env_step in 0..setup.total_steps {
        let obs_raw = obs.flatten();

        let action_n: [f64; 2] = if env_step < setup.td3.warmup_steps {
            [agent_rng.gen_range(-1.0..1.0), agent_rng.gen_range(-1.0..1.0)]
        } else {
            let net_in = match &normalizer {
                Some(n) => n.normalize(&obs_raw),
                None => obs_raw.clone(),
            };
            agent.act_explore(&net_in, &mut agent_rng)
        };
        if !action_n.iter().all(|v| v.is_finite()) {
            return Err(TrainError::NonFinite {
                quantity: "action",
                env_step,
            });
        }

        // What the reference driver would do in this exact state. Queried
        // before stepping, never executed, and free of RNG use.
        let reference = if setup.guided {
            to_normalized(&expert.act(&world, &obs))
        } else {
            [0.0, 0.0]
        };

        let outcome = world.step(to_action(&action_n))?;
        if !outcome.reward.is_finite() {
            return Err(TrainError::NonFinite {
                quantity: "reward",
                env_step,
            });
        }
        let next_raw = outcome.observation.flatten();
        if let Some(n) = normalizer.as_mut() {
            n.update(&next_raw);
        }
        buffer.push(Transition {
            obs: obs_raw,
            action: action_n,
            reward: outcome.reward,
            next_obs: next_raw,
            terminal: terminal_for_bootstrap(outcome.done, outcome.reason),
            reference_action: reference,
        });
        episode_reward += outcome.reward;
        episode_steps += 1;

        if env_step >= setup.td3.warmup_steps && buffer.len() >= setup.td3.batch_size {
            let indices = buffer.sample_indices(&mut agent_rng, setup.td3.batch_size);
            let batch = Batch::from_buffer(&buffer, &indices, normalizer.as_ref());
            let critic_losses = agent.critic_update(&batch, &mut agent_rng);
            if !critic_losses.iter().all(|v| v.is_finite()) {
                return Err(TrainError::NonFinite {
                    quantity: "critic loss",
                    env_step,
                });
            }

            if agent.critic_updates.is_multiple_of(setup.td3.policy_delay) {
                let t = agent.actor_updates;
                let rule = if setup.guided {
                    Some(match &schedule {
                        Some(s) => BetaRule::Fixed(s.beta(t)),
                        None => BetaRule::MatchPolicyMagnitude,
                    })
                } else {
                    None
                };
                let report = agent.actor_update(&batch, rule);
                if !report.policy_loss.is_finite()
                    || !report.beta.is_finite()
                    || report.guidance_loss.is_some_and(|g| !g.is_finite())
                {
                    return Err(TrainError::NonFinite {
                        quantity: "actor loss",
                        env_step,
                    });
                }
                if setup.guided && schedule.is_none() {
                    schedule = Some(FadingSchedule::new(report.beta, setup.q2, planned_updates));
                }
                updates.push(UpdateRecord {
                    env_step: env_step + 1,
                    actor_update: t,
                    beta: report.beta,
                    policy_loss: report.policy_loss,
                    guidance_loss: report.guidance_loss,
                    critic1_loss: critic_losses[0],
                    critic2_loss: critic_losses[1],
                });
            }
        }

        if outcome.done {
            episodes.push(EpisodeRecord {
                end_step: env_step + 1,
                reward: episode_reward,
                steps: episode_steps,
                reason: outcome.reason.label().to_string(),
            });
            episode_reward = 0.0;
            episode_steps = 0;
            expert.reset();
            world = setup.traffic.build(&setup.env, env_rng.gen())?;
            obs = world.observe();
            if let Some(n) = normalizer.as_mut() {
                n.update(&obs.flatten());
            }
        } else {
            obs = outcome.observation;
        }

        if setup.eval_every > 0 && (env_step + 1) % setup.eval_every == 0 {
            let eval_index = (env_step + 1) / setup.eval_every;
            let seeds: Vec<u64> = (0..setup.eval_episodes)
                .map(|e| mix_seed(setup.seed, eval_index * 1_000 + u64::from(e)))
                .collect();
            let summary = evaluate(
                &agent.actor,
                normalizer.as_ref(),
                &setup.env,
                setup.traffic,
                &seeds,
            )?;
            evals.push(EvalPoint {
                env_step: env_step + 1,
                mean_reward: summary.mean_reward,
                mean_steps: summary.mean_steps,
                destination_rate: summary.destination_rate,
                collision_rate: summary.collision_rate,
            });
        }
    }

    let q1_resolved = schedule.as_ref().map(|s| s.q1);
    Ok(TrainOutcome {
        agent,
        normalizer,
        updates,
        episodes,
        evals,
        q1_resolved,
        planned_actor_updates: planned_updates,
    })
}
