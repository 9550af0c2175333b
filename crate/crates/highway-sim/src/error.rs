use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("non-finite vehicle state: {0}")]
    NonFiniteState(String),
    #[error("policy produced a non-finite action at step {step}: accel={accel}, steer={steer}")]
    NonFiniteAction { step: usize, accel: f64, steer: f64 },
    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),
    #[error("step called on a finished episode")]
    EpisodeOver,
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}
