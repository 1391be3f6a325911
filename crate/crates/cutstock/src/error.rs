use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] crate::instance::InstanceError),

    #[error("invalid basis: {0}")]
    Basis(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("rejection sampling budget of {cap} attempts exhausted")]
    RejectionBudget { cap: u32 },

    #[error("cannot solve from an empty sample (no transitions absorbed)")]
    EmptySample,

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("artifact error: {0}")]
    Artifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
