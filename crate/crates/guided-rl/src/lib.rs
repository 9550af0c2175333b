//! Reinforcement learning of an overtaking controller with fading guidance.
//!
//! The learner is an off-policy actor-critic with twin critics, delayed
//! actor updates, and target-policy smoothing, trained on the driving
//! simulation from `highway-sim`. During training, the rule-based driver
//! from `expert-system` is queried at every visited state and the actor's
//! loss carries an extra mean-squared term toward those reference actions.
//! The term's weight starts at `q1` and decays as `q1 · exp(-q2 · t / T)`
//! over the planned actor updates, so early learning is steered by the
//! reference controller and late learning is pure reinforcement. With the
//! weight at zero the updates are arithmetically identical to the plain
//! unguided algorithm, which makes guided-versus-unguided comparisons
//! exact.
//!
//! All numerics are `f64` on hand-sized dense networks; runs are
//! reproducible bit-for-bit from a single seed.

pub mod buffer;
pub mod checkpoint;
pub mod fading;
pub mod loss;
pub mod nn;
pub mod normalize;
pub mod td3;
pub mod trainer;

pub use buffer::{ReplayBuffer, Transition};
pub use checkpoint::{config_hash, Checkpoint, CheckpointError, LayerDump, CHECKPOINT_VERSION};
pub use fading::FadingSchedule;
pub use loss::{actor_loss, guidance_mse};
pub use nn::{soft_update, Adam, ForwardCache, Layer, Mlp, MlpGrads};
pub use normalize::ObservationNormalizer;
pub use td3::{
    to_action, to_normalized, ActorUpdateReport, Batch, BetaRule, GreedyActor, Td3Agent, Td3Config,
};
pub use trainer::{
    evaluate, terminal_for_bootstrap, train, EnvTraffic, EpisodeRecord, EvalPoint, EvalSummary,
    TrainError, TrainOutcome, TrainSetup, UpdateRecord,
};
