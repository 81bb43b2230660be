//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("protocol document syntax error: {0}")]
    Syntax(String),

    #[error("protocol document semantic error: {0}")]
    Semantic(String),

    #[error("operation is not defined for upper-bound-model trees (a node has bound_mode set)")]
    UnsupportedModel,

    #[error("truncation horizon limit reached before convergence (best mean so far: {partial})")]
    ResourceLimit { partial: f64 },

    #[error("check inconclusive: tolerance {tolerance} is below the truncation tail mass {tail_mass}")]
    InconclusiveTruncation { tolerance: f64, tail_mass: f64 },

    #[error("precondition not met: {0}")]
    PreconditionUnmet(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
