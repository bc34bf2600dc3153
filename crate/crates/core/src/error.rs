use thiserror::Error;

use crate::behavior::SignalingWitness;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),
    #[error("invalid functional: {0}")]
    InvalidFunctional(String),
    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),
    #[error("functional has a negative coefficient {coeff} at settings {settings:?} outcomes {outcomes:?}; apply normalize_nonneg first")]
    NotNonNegative {
        settings: Vec<usize>,
        outcomes: Vec<usize>,
        coeff: String,
    },
    #[error("behavior is signaling: {0}")]
    Signaling(Box<SignalingWitness>),
    #[error("{0}")]
    Precondition(String),
    #[error("linear program: {0}")]
    Lp(#[from] exact_lp::LpError),
    #[error("linear program unexpectedly {0}")]
    LpStatus(String),
    #[error("document error at {path}: {message}")]
    Document { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
