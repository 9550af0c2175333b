use thiserror::Error;

#[derive(Debug, Error)]
pub enum CilqrError {
    #[error("initial trajectory has non-finite augmented cost; seed with a finite rollout")]
    NonFiniteSeed,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value produced during {0}")]
    NonFinite(&'static str),
}
