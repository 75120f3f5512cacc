use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rule set is empty, nothing to build an instance from")]
    EmptyInstance,

    #[error("attribute value index {index} out of range for a universe of {m} values")]
    AttributeOutOfRange { index: usize, m: usize },

    #[error("invalid rule for tag {label:?}: {reason}")]
    InvalidRule { label: String, reason: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(
        "polarity quota cannot be met: need {need_pos} positive / {need_neg} negative tags, \
         have {have_pos} / {have_neg}"
    )]
    InfeasiblePolarity {
        need_pos: usize,
        need_neg: usize,
        have_pos: usize,
        have_neg: usize,
    },

    #[error("no selection satisfies the relevance bound {threshold:.6}")]
    Infeasible { threshold: f64 },

    #[error("exact solvers are capped at {cap} tags, instance has {n}")]
    TooLarge { n: usize, cap: usize },

    #[error("no ratings for demographic group {0:?}")]
    NoData(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
