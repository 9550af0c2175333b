//! Saving and restoring trained agents as a single versioned JSON document.
//! The document embeds the full training setup plus a hash of it, so a
//! loaded policy can always be traced back to the exact run that made it.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::nn::{Layer, Mlp};
use crate::normalize::ObservationNormalizer;
use crate::td3::{GreedyActor, Td3Agent};
use crate::trainer::{TrainOutcome, TrainSetup};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unsupported checkpoint version {0} (this build reads version {CHECKPOINT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("malformed checkpoint: {0}")]
    Malformed(String),
}

/// One dense layer: weights in column-major order plus the bias vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LayerDump {
    pub rows: usize,
    pub cols: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl LayerDump {
    fn from_layer(layer: &Layer) -> Self {
        Self {
            rows: layer.w.nrows(),
            cols: layer.w.ncols(),
            w: layer.w.as_slice().to_vec(),
            b: layer.b.as_slice().to_vec(),
        }
    }

    fn to_layer(&self) -> Result<Layer, CheckpointError> {
        if self.w.len() != self.rows * self.cols || self.b.len() != self.rows {
            return Err(CheckpointError::Malformed(format!(
                "layer claims {}x{} but carries {} weights and {} biases",
                self.rows,
                self.cols,
                self.w.len(),
                self.b.len()
            )));
        }
        Ok(Layer {
            w: DMatrix::from_column_slice(self.rows, self.cols, &self.w),
            b: DVector::from_column_slice(&self.b),
        })
    }
}

fn dump_mlp(mlp: &Mlp) -> Vec<LayerDump> {
    mlp.layers.iter().map(LayerDump::from_layer).collect()
}

fn load_mlp(dumps: &[LayerDump]) -> Result<Mlp, CheckpointError> {
    if dumps.is_empty() {
        return Err(CheckpointError::Malformed("network with no layers".into()));
    }
    let layers = dumps
        .iter()
        .map(|d| d.to_layer())
        .collect::<Result<Vec<_>, _>>()?;
    for pair in layers.windows(2) {
        if pair[1].w.ncols() != pair[0].w.nrows() {
            return Err(CheckpointError::Malformed(
                "adjacent layer shapes do not chain".into(),
            ));
        }
    }
    Ok(Mlp { layers })
}

/// Running observation statistics in serializable form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalizerDump {
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
    pub count: u64,
    pub skip: Vec<bool>,
    pub clip: f64,
}

impl NormalizerDump {
    fn from_normalizer(n: &ObservationNormalizer) -> Self {
        let (mean, m2, count, skip, clip) = n.state();
        Self {
            mean: mean.to_vec(),
            m2: m2.to_vec(),
            count,
            skip: skip.to_vec(),
            clip,
        }
    }

    fn to_normalizer(&self) -> Result<ObservationNormalizer, CheckpointError> {
        if self.mean.len() != self.m2.len() || self.mean.len() != self.skip.len() {
            return Err(CheckpointError::Malformed(
                "normalizer vectors disagree on length".into(),
            ));
        }
        Ok(ObservationNormalizer::from_state(
            self.mean.clone(),
            self.m2.clone(),
            self.count,
            self.skip.clone(),
            self.clip,
        ))
    }
}

/// SHA-256 hex digest of the canonical JSON form of a training setup.
pub fn config_hash(setup: &TrainSetup) -> String {
    let json = serde_json::to_string(setup).expect("training setup serializes");
    let digest = Sha256::digest(json.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// A complete trained agent: all six networks, observation statistics,
/// update counters, and the setup that produced them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config_hash: String,
    pub setup: TrainSetup,
    pub obs_dim: usize,
    pub actor: Vec<LayerDump>,
    pub target_actor: Vec<LayerDump>,
    pub critic1: Vec<LayerDump>,
    pub critic2: Vec<LayerDump>,
    pub target_critic1: Vec<LayerDump>,
    pub target_critic2: Vec<LayerDump>,
    pub normalizer: Option<NormalizerDump>,
    pub critic_updates: u64,
    pub actor_updates: u64,
    pub q1_resolved: Option<f64>,
}

impl Checkpoint {
    pub fn from_outcome(setup: &TrainSetup, outcome: &TrainOutcome) -> Self {
        let agent = &outcome.agent;
        Self {
            version: CHECKPOINT_VERSION,
            config_hash: config_hash(setup),
            setup: setup.clone(),
            obs_dim: agent.obs_dim,
            actor: dump_mlp(&agent.actor),
            target_actor: dump_mlp(&agent.target_actor),
            critic1: dump_mlp(&agent.critics[0]),
            critic2: dump_mlp(&agent.critics[1]),
            target_critic1: dump_mlp(&agent.target_critics[0]),
            target_critic2: dump_mlp(&agent.target_critics[1]),
            normalizer: outcome.normalizer.as_ref().map(NormalizerDump::from_normalizer),
            critic_updates: agent.critic_updates,
            actor_updates: agent.actor_updates,
            q1_resolved: outcome.q1_resolved,
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        let json = fs::read_to_string(path)?;
        let loaded: Self = serde_json::from_str(&json)?;
        if loaded.version != CHECKPOINT_VERSION {
            return Err(CheckpointError::UnsupportedVersion(loaded.version));
        }
        Ok(loaded)
    }

    /// Rebuilds the full agent (with fresh optimizer state).
    pub fn agent(&self) -> Result<Td3Agent, CheckpointError> {
        Ok(Td3Agent::from_networks(
            self.setup.td3.clone(),
            self.obs_dim,
            load_mlp(&self.actor)?,
            load_mlp(&self.target_actor)?,
            [load_mlp(&self.critic1)?, load_mlp(&self.critic2)?],
            [load_mlp(&self.target_critic1)?, load_mlp(&self.target_critic2)?],
            self.critic_updates,
            self.actor_updates,
        ))
    }

    /// Rebuilds just the deterministic controller.
    pub fn greedy_actor(&self) -> Result<GreedyActor, CheckpointError> {
        let normalizer = match &self.normalizer {
            Some(d) => Some(d.to_normalizer()?),
            None => None,
        };
        Ok(GreedyActor {
            actor: load_mlp(&self.actor)?,
            normalizer,
        })
    }
}
