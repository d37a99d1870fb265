use std::path::PathBuf;

use thiserror::Error;

use crate::trace::IterateTrace;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum SpsaError {
    /// A caller passed an argument outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An objective returned a non-finite value.
    #[error("objective evaluated to {value} at {x:?}")]
    Evaluation { x: Vec<f64>, value: f64 },

    /// A schedule, run or experiment configuration is inconsistent.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The iterate left the finite reals. The trace recorded so far is kept.
    #[error("iterate diverged at iteration {iteration}")]
    Divergence {
        iteration: u64,
        trace: Box<IterateTrace>,
    },

    /// A brute-force oracle was asked for more than it can enumerate.
    #[error("dimension {n} exceeds enumeration capacity {max}")]
    Capacity { n: usize, max: usize },

    /// The asymptotic predictor does not apply to this problem.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A hypothesis of the asymptotic normality result is violated.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Too few samples for the requested statistic.
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

pub type Result<T, E = SpsaError> = std::result::Result<T, E>;

impl SpsaError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SpsaError::Io {
            path: path.into(),
            source,
        }
    }
}
