use thiserror::Error;

/// Errors surfaced by fan validation, cohomology scans and collection builders.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("fan has {0} rays, at most 64 are supported")]
    TooManyRays(usize),

    #[error("divisor has {got} coefficients, expected {expected} (one per ray)")]
    DivisorLength { got: usize, expected: usize },

    #[error("weight has {got} coordinates, expected {expected}")]
    WeightLength { got: usize, expected: usize },

    #[error("divisor is not Cartier (no integral linear functional on cone {cone})")]
    NotCartier { cone: usize },

    #[error("weight box verification failed after {doublings} doublings")]
    BoxVerification { doublings: usize },

    #[error("point is not in the support of the fan")]
    OutsideSupport,

    #[error("inconsistent quiver/ray dictionary: {0}")]
    InconsistentQuiver(String),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error("facet classification needs at most {cap} rays, fan has {got}")]
    ClassifyCap { cap: usize, got: usize },

    #[error("integer overflow in weight pairing; coordinates out of supported range")]
    Overflow,

    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
