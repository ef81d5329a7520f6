use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("fractional order {order} outside the admissible range {range}")]
    InvalidOrder { order: f64, range: &'static str },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("exponent p = {0} must satisfy 1 < p < infinity")]
    InvalidExponent(f64),

    #[error("point {point:?} outside the weight domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("multiplier is not finite at frequency {frequency:?}")]
    NonFiniteMultiplier { frequency: Vec<f64> },

    #[error("ellipticity violated at time index {time_index}, node {node}: eigenvalues ({min_eig}, {max_eig}) vs delta = {delta}")]
    Ellipticity {
        time_index: usize,
        node: usize,
        min_eig: f64,
        max_eig: f64,
        delta: f64,
    },

    #[error("fixed-point iteration did not converge on time slice {slice} (increment {increment:e} after {iterations} iterations)")]
    NonConvergence {
        slice: usize,
        iterations: usize,
        increment: f64,
    },

    #[error("implicit step is not a contraction on slice {slice}: weight * c = {factor}")]
    StepContraction { slice: usize, factor: f64 },

    #[error("problem size {size} exceeds the cap {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("Mittag-Leffler evaluation overflows for z = {0}")]
    Overflow(f64),

    #[error("partition of unity leaves node {node} uncovered")]
    CoverageGap { node: usize },

    #[error("initial data must vanish: {0}")]
    NonzeroInitialData(String),

    #[error("rescaling ratio {0} is not of the form 2^-m")]
    NonDyadicRatio(f64),

    #[error("unknown suite id {0:?}")]
    UnknownSuite(String),

    #[error("unknown check id {0:?}")]
    UnknownCheck(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("check {check} failed for parameters [{params}]: {source}")]
    Check {
        check: String,
        params: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
