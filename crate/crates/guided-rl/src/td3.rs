//! Twin-critic deterministic-actor learner. The actor update can blend in
//! an imitation gradient toward stored reference actions, weighted by the
//! fading schedule; with the weight at zero the update is arithmetically
//! identical to the plain unguided algorithm.

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use highway_sim::{Action, Observation, Policy, World, MAX_ACCEL, MAX_STEER};

use crate::buffer::ReplayBuffer;
use crate::loss::guidance_mse;
use crate::nn::{soft_update, Adam, Mlp};
use crate::normalize::ObservationNormalizer;

/// Hyperparameters of the learner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Td3Config {
    /// Hidden layer widths shared by actor and critics.
    pub hidden: Vec<usize>,
    pub gamma: f64,
    /// Target-network smoothing coefficient.
    pub tau: f64,
    /// Critic updates per actor (and target) update.
    pub policy_delay: u64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub actor_lr: f64,
    pub critic_lr: f64,
    /// Exploration noise std, in normalized action units.
    pub exploration_noise: f64,
    /// Target-policy smoothing noise std and clip.
    pub target_noise: f64,
    pub target_noise_clip: f64,
    /// Environment steps taken with uniform random actions before updates.
    pub warmup_steps: u64,
    pub normalize_observations: bool,
    /// Symmetric clip on standardized observation features.
    pub observation_clip: f64,
}

impl Default for Td3Config {
    fn default() -> Self {
        Self {
            hidden: vec![64, 64],
            gamma: 0.99,
            tau: 0.005,
            policy_delay: 2,
            batch_size: 256,
            buffer_capacity: 100_000,
            actor_lr: 1e-3,
            critic_lr: 1e-3,
            exploration_noise: 0.1,
            target_noise: 0.2,
            target_noise_clip: 0.5,
            warmup_steps: 1_000,
            normalize_observations: true,
            observation_clip: 10.0,
        }
    }
}

impl Td3Config {
    pub fn validate(&self) -> Result<(), String> {
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err("hidden layers must be non-empty and positive".into());
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(format!("gamma must be in [0, 1), got {}", self.gamma));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(format!("tau must be in (0, 1], got {}", self.tau));
        }
        if self.policy_delay == 0 {
            return Err("policy_delay must be >= 1".into());
        }
        if self.batch_size == 0 || self.buffer_capacity < self.batch_size {
            return Err("need batch_size >= 1 and buffer_capacity >= batch_size".into());
        }
        if !(self.actor_lr > 0.0 && self.critic_lr > 0.0) {
            return Err("learning rates must be positive".into());
        }
        for (name, v) in [
            ("exploration_noise", self.exploration_noise),
            ("target_noise", self.target_noise),
            ("target_noise_clip", self.target_noise_clip),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if !self.observation_clip.is_finite() || self.observation_clip <= 0.0 {
            return Err("observation_clip must be finite and positive".into());
        }
        Ok(())
    }
}

/// A training batch in matrix form: one column per sampled transition,
/// observations already normalized.
pub struct Batch {
    pub obs: DMatrix<f64>,
    pub actions: DMatrix<f64>,
    pub rewards: Vec<f64>,
    pub next_obs: DMatrix<f64>,
    /// 1.0 where bootstrapping continues, 0.0 at genuine terminals.
    pub not_terminal: Vec<f64>,
    pub references: DMatrix<f64>,
}

impl Batch {
    pub fn from_buffer(
        buffer: &ReplayBuffer,
        indices: &[usize],
        normalizer: Option<&ObservationNormalizer>,
    ) -> Self {
        assert!(!indices.is_empty());
        let obs_dim = buffer.get(indices[0]).obs.len();
        let b = indices.len();
        let mut obs = DMatrix::zeros(obs_dim, b);
        let mut next_obs = DMatrix::zeros(obs_dim, b);
        let mut actions = DMatrix::zeros(2, b);
        let mut references = DMatrix::zeros(2, b);
        let mut rewards = Vec::with_capacity(b);
        let mut not_terminal = Vec::with_capacity(b);
        for (j, &i) in indices.iter().enumerate() {
            let t = buffer.get(i);
            let (o, no) = match normalizer {
                Some(n) => (n.normalize(&t.obs), n.normalize(&t.next_obs)),
                None => (t.obs.clone(), t.next_obs.clone()),
            };
            obs.column_mut(j).copy_from_slice(&o);
            next_obs.column_mut(j).copy_from_slice(&no);
            actions.column_mut(j).copy_from_slice(&t.action);
            references.column_mut(j).copy_from_slice(&t.reference_action);
            rewards.push(t.reward);
            not_terminal.push(if t.terminal { 0.0 } else { 1.0 });
        }
        Self {
            obs,
            actions,
            rewards,
            next_obs,
            not_terminal,
            references,
        }
    }

    pub fn len(&self) -> usize {
        self.obs.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// How the actor update weights the imitation term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaRule {
    Fixed(f64),
    /// Pick the weight that makes the imitation term's magnitude match the
    /// policy term's at this update: |L_policy| / L_guidance (1.0 when the
    /// imitation loss is already ~0).
    MatchPolicyMagnitude,
}

/// What one actor update reported: the two loss components and the weight
/// actually applied. `guidance_loss` is None when the update ran unguided.
#[derive(Clone, Copy, Debug)]
pub struct ActorUpdateReport {
    pub policy_loss: f64,
    pub guidance_loss: Option<f64>,
    pub beta: f64,
}

pub struct Td3Agent {
    pub config: Td3Config,
    pub obs_dim: usize,
    pub act_dim: usize,
    pub actor: Mlp,
    pub target_actor: Mlp,
    pub critics: [Mlp; 2],
    pub target_critics: [Mlp; 2],
    actor_opt: Adam,
    critic_opts: [Adam; 2],
    pub critic_updates: u64,
    pub actor_updates: u64,
}

impl Td3Agent {
    /// Networks are initialized from `rng` in a fixed order (actor, then
    /// the two critics), so a seed fully determines the starting point.
    pub fn new(obs_dim: usize, config: Td3Config, rng: &mut ChaCha8Rng) -> Self {
        config.validate().expect("invalid learner configuration");
        let act_dim = 2;
        let mut actor_sizes = vec![obs_dim];
        actor_sizes.extend_from_slice(&config.hidden);
        actor_sizes.push(act_dim);
        let mut critic_sizes = vec![obs_dim + act_dim];
        critic_sizes.extend_from_slice(&config.hidden);
        critic_sizes.push(1);

        let actor = Mlp::new(&actor_sizes, rng);
        let critics = [Mlp::new(&critic_sizes, rng), Mlp::new(&critic_sizes, rng)];
        let actor_opt = Adam::new(&actor, config.actor_lr);
        let critic_opts = [
            Adam::new(&critics[0], config.critic_lr),
            Adam::new(&critics[1], config.critic_lr),
        ];
        Self {
            target_actor: actor.clone(),
            target_critics: critics.clone(),
            actor,
            critics,
            actor_opt,
            critic_opts,
            obs_dim,
            act_dim,
            config,
            critic_updates: 0,
            actor_updates: 0,
        }
    }

    /// Rebuilds an agent around loaded networks (fresh optimizer moments).
    #[allow(clippy::too_many_arguments)]
    pub fn from_networks(
        config: Td3Config,
        obs_dim: usize,
        actor: Mlp,
        target_actor: Mlp,
        critics: [Mlp; 2],
        target_critics: [Mlp; 2],
        critic_updates: u64,
        actor_updates: u64,
    ) -> Self {
        let actor_opt = Adam::new(&actor, config.actor_lr);
        let critic_opts = [
            Adam::new(&critics[0], config.critic_lr),
            Adam::new(&critics[1], config.critic_lr),
        ];
        Self {
            config,
            obs_dim,
            act_dim: 2,
            actor,
            target_actor,
            critics,
            target_critics,
            actor_opt,
            critic_opts,
            critic_updates,
            actor_updates,
        }
    }

    /// Deterministic action in normalized units, always within [-1, 1].
    pub fn act_greedy(&self, obs: &[f64]) -> [f64; 2] {
        let x = DMatrix::from_column_slice(obs.len(), 1, obs);
        let y = self.actor.forward(&x);
        [y[(0, 0)].tanh(), y[(1, 0)].tanh()]
    }

    /// Greedy action plus white exploration noise, clamped to [-1, 1].
    pub fn act_explore(&self, obs: &[f64], rng: &mut ChaCha8Rng) -> [f64; 2] {
        let mut a = self.act_greedy(obs);
        if self.config.exploration_noise > 0.0 {
            let normal = Normal::new(0.0, self.config.exploration_noise)
                .expect("validated noise scale");
            for v in &mut a {
                *v = (*v + normal.sample(rng)).clamp(-1.0, 1.0);
            }
        }
        a
    }

    /// Bootstrapped TD targets: r + γ·(1-terminal)·min of the two target
    /// critics at the smoothed target-policy action.
    pub fn td_targets(&self, batch: &Batch, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut next_actions = self.target_actor.forward(&batch.next_obs).map(f64::tanh);
        if self.config.target_noise > 0.0 {
            let normal =
                Normal::new(0.0, self.config.target_noise).expect("validated noise scale");
            let clip = self.config.target_noise_clip;
            for v in next_actions.iter_mut() {
                let eps = normal.sample(rng).clamp(-clip, clip);
                *v = (*v + eps).clamp(-1.0, 1.0);
            }
        }
        let x = stack_rows(&batch.next_obs, &next_actions);
        let q1 = self.target_critics[0].forward(&x);
        let q2 = self.target_critics[1].forward(&x);
        (0..batch.len())
            .map(|j| {
                batch.rewards[j]
                    + self.config.gamma * batch.not_terminal[j] * q1[(0, j)].min(q2[(0, j)])
            })
            .collect()
    }

    /// One gradient step on both critics; returns their mean squared TD
    /// errors.
    pub fn critic_update(&mut self, batch: &Batch, rng: &mut ChaCha8Rng) -> [f64; 2] {
        let y = self.td_targets(batch, rng);
        let x = stack_rows(&batch.obs, &batch.actions);
        let b = batch.len() as f64;
        let mut losses = [0.0; 2];
        for ((critic, opt), loss_slot) in self
            .critics
            .iter_mut()
            .zip(self.critic_opts.iter_mut())
            .zip(losses.iter_mut())
        {
            let cache = critic.forward_cached(&x);
            let q = cache.output();
            let mut dq = DMatrix::zeros(1, batch.len());
            let mut loss = 0.0;
            for (j, target) in y.iter().enumerate() {
                let d = q[(0, j)] - target;
                loss += d * d;
                dq[(0, j)] = 2.0 * d / b;
            }
            *loss_slot = loss / b;
            let (grads, _) = critic.backward(&cache, &dq);
            opt.step(critic, &grads);
        }
        self.critic_updates += 1;
        losses
    }

    /// One delayed actor step. The policy term is the negated mean value of
    /// the first critic at the actor's own actions; with `guidance` present
    /// the imitation gradient toward the batch's reference actions is added,
    /// weighted by the rule's β. A zero β computes the imitation loss for
    /// reporting but contributes no arithmetic to the parameter update.
    /// Target networks are smoothed afterwards.
    pub fn actor_update(&mut self, batch: &Batch, guidance: Option<BetaRule>) -> ActorUpdateReport {
        let b = batch.len() as f64;
        let a_cache = self.actor.forward_cached(&batch.obs);
        let actions = a_cache.output().map(f64::tanh);

        let x = stack_rows(&batch.obs, &actions);
        let q_cache = self.critics[0].forward_cached(&x);
        let policy_loss = -q_cache.output().iter().sum::<f64>() / b;
        let dq = DMatrix::from_element(1, batch.len(), -1.0 / b);
        let (_, dx) = self.critics[0].backward(&q_cache, &dq);
        let mut d_actions = dx.rows(self.obs_dim, self.act_dim).into_owned();

        let (guidance_loss, beta) = match guidance {
            None => (None, 0.0),
            Some(rule) => {
                let g = guidance_mse(&actions, &batch.references);
                let beta = match rule {
                    BetaRule::Fixed(v) => v,
                    BetaRule::MatchPolicyMagnitude => {
                        if g > 1e-12 {
                            policy_loss.abs() / g
                        } else {
                            1.0
                        }
                    }
                };
                if beta != 0.0 {
                    let scale = beta * 2.0 / (b * self.act_dim as f64);
                    for (k, (a, r)) in actions.iter().zip(batch.references.iter()).enumerate() {
                        d_actions.as_mut_slice()[k] += scale * (a - r);
                    }
                }
                (Some(g), beta)
            }
        };

        let d_preact = d_actions.zip_map(&actions, |g, a| g * (1.0 - a * a));
        let (grads, _) = self.actor.backward(&a_cache, &d_preact);
        self.actor_opt.step(&mut self.actor, &grads);
        self.actor_updates += 1;

        soft_update(&mut self.target_actor, &self.actor, self.config.tau);
        for i in 0..2 {
            soft_update(&mut self.target_critics[i], &self.critics[i], self.config.tau);
        }
        ActorUpdateReport {
            policy_loss,
            guidance_loss,
            beta,
        }
    }
}

/// Stacks two matrices with equal column counts on top of each other.
pub fn stack_rows(top: &DMatrix<f64>, bottom: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(top.ncols(), bottom.ncols());
    let mut out = DMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.rows_mut(0, top.nrows()).copy_from(top);
    out.rows_mut(top.nrows(), bottom.nrows()).copy_from(bottom);
    out
}

/// Converts an applied (clamped) action to normalized [-1, 1] units.
pub fn to_normalized(action: &Action) -> [f64; 2] {
    [action.accel() / MAX_ACCEL, action.steer() / MAX_STEER]
}

/// Converts normalized units back to actuator units.
pub fn to_action(a: &[f64; 2]) -> Action {
    Action::new(a[0] * MAX_ACCEL, a[1] * MAX_STEER)
}

/// A frozen trained controller: normalizes the observation with fixed
/// statistics and drives with the deterministic (noise-free) actor.
#[derive(Clone, Debug)]
pub struct GreedyActor {
    pub actor: Mlp,
    pub normalizer: Option<ObservationNormalizer>,
}

impl Policy for GreedyActor {
    fn act(&mut self, _world: &World, observation: &Observation) -> Action {
        let flat = observation.flatten();
        let obs = match &self.normalizer {
            Some(n) => n.normalize(&flat),
            None => flat,
        };
        let x = DMatrix::from_column_slice(obs.len(), 1, &obs);
        let y = self.actor.forward(&x);
        to_action(&[y[(0, 0)].tanh(), y[(1, 0)].tanh()])
    }
}
