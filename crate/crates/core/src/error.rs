use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge list is empty")]
    EmptyInput,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "graph has {components} connected components; restrict it to the giant component first"
    )]
    Disconnected { components: usize },

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degree distribution is not normalized (sum = {0})")]
    Unnormalized(f64),

    #[error("all degrees are zero")]
    ZeroDegrees,

    #[error("model is subcritical (branching factor {0} <= 1)")]
    Subcritical(f64),

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("curves have no overlapping x-range")]
    NoOverlap,

    #[error("solver did not converge after {0} iterations")]
    NoConvergence(usize),
}
