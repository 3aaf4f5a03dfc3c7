use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("{method} did not converge within {iters} iterations")]
    NoConvergence { method: &'static str, iters: usize },

    #[error("line search failed after {backtracks} backtracks from step {zeta0:e}")]
    LineSearchFailed { zeta0: f64, backtracks: usize },

    #[error("Barzilai-Borwein step is undefined (numerator {numerator:e}, denominator {denominator:e})")]
    StepUndefined { numerator: f64, denominator: f64 },

    #[error("dual point S + U is not positive definite")]
    DualInfeasible,

    #[error("initial iterate is not positive definite")]
    InvalidInit,

    #[error("no positive definite starting point in the dual box")]
    InfeasibleStart,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("trace too short for rate estimation: {0}")]
    InsufficientTrace(String),

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
