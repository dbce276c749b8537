//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("dimension mismatch: expected {expected} samples, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite multiplier value at wavenumber ({0}, {1}, {2})")]
    NonFiniteMultiplier(f64, f64, f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("resolution guard: {0}")]
    Resolution(String),
    #[error("blow-up guard tripped at t = {t:.6}: max |phi| = {max_abs:.3e}")]
    BlowUp { t: f64, max_abs: f64 },
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("conservation violated: {0}")]
    ConservationViolated(String),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("time grids differ: {0}")]
    TimeGridMismatch(String),
    #[error("map is not reduced: values must be nondecreasing")]
    NotReduced,
    #[error("enumeration range exceeded: {0}")]
    RangeExceeded(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("quadrature step too coarse: {0}")]
    QuadratureStep(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed field file: {0}")]
    MalformedFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
