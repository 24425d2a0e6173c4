use thiserror::Error;

/// Errors raised by the sequence calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("horizon exceeded: index {requested} is beyond the evaluable horizon {limit}")]
    HorizonExceeded { requested: String, limit: String },

    #[error("finite-rank sequence: zero entry at n = {n}")]
    FiniteRank { n: u64 },

    #[error("not a ratio sequence at n = {n}: {detail}")]
    NotRatioSequence { n: u64, detail: String },

    #[error("not a concavity sequence at n = {n}")]
    NotConcavitySequence { n: u64 },

    #[error("not an am-image at n = {n}")]
    NotAmImage { n: u64 },

    #[error("summable or horizon exceeded: {0}")]
    Summable(String),

    #[error("unreachable bound: {0}")]
    UnreachableBound(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("value is not exact in rational mode: {0}")]
    Inexact(String),

    #[error("degenerate difference: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Errors that come from hitting a computational limit rather than bad input.
    pub fn is_capability(&self) -> bool {
        matches!(
            self,
            Error::HorizonExceeded { .. } | Error::Summable(_) | Error::Inexact(_) | Error::Degenerate(_)
        )
    }

    pub(crate) fn horizon(requested: impl ToString, limit: impl ToString) -> Self {
        Error::HorizonExceeded {
            requested: requested.to_string(),
            limit: limit.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
