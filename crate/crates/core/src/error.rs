use thiserror::Error;

use crate::disk::OrbitBall;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed word {word:?}: {reason}")]
    MalformedWord { word: String, reason: String },

    #[error("boundary point not representable in this model: {0}")]
    UnsupportedBoundaryPoint(String),

    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    #[error("invalid preset: {0}")]
    InvalidPreset(String),

    #[error("orbit ball exceeded capacity {limit} (partial result holds {} elements)", partial.len())]
    Capacity { limit: usize, partial: Box<OrbitBall> },

    #[error("counting overflow: {0}")]
    Overflow(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("stream audit failure: {0}")]
    StreamAudit(String),

    #[error("exact decision conflicts with heuristic label: {0}")]
    DecisionConflict(String),

    #[error("non-free orbit refused: {0}")]
    NonFreeOrbit(String),
}

impl Error {
    pub(crate) fn malformed(word: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::MalformedWord {
            word: word.into(),
            reason: reason.into(),
        }
    }
}
