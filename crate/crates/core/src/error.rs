use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("partition side is empty")]
    EmptySide,
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("neighborhood violation at iteration {iter}: centrality error {err:e} exceeds {bound:e}")]
    NeighborhoodViolation { iter: usize, err: f64, bound: f64 },
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
