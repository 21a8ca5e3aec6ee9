use thiserror::Error;

/// Errors raised by the geometry, volume and bounds routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least {1}")]
    InvalidDimension(usize, usize),

    #[error("index k={k} out of range [{lo}, {hi}]")]
    IndexOutOfRange { k: usize, lo: usize, hi: usize },

    #[error("dimension mismatch: body has n={expected}, vector has length {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("direction is not a unit vector (|theta| = {0})")]
    NotUnit(f64),

    #[error("direction must have nonnegative entries")]
    NotNonnegative,

    #[error("point ({a}, {b}) lies outside the disk segment")]
    OutsideDiskSegment { a: f64, b: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("triangle ({alpha}, {beta}) does not contain the disk segment")]
    InfeasibleTriangle { alpha: f64, beta: f64 },

    #[error("quadrature did not converge within {panels} panels (relative error {rel_err:e})")]
    QuadratureBudget { panels: usize, rel_err: f64 },

    #[error("Monte Carlo run produced zero hits in {0} samples")]
    ZeroHits(u64),

    #[error("numerical check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
