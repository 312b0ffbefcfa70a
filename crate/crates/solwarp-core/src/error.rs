use thiserror::Error;

/// Errors produced by chart evaluation and geometric operations.
///
/// Every numeric failure carries the point where it happened, so a bad
/// sample in a sweep can be reproduced directly.
#[derive(Debug, Clone, Error)]
pub enum GeomError {
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error in `{primitive}` (argument {arg}) at point {point:?}")]
    JetDomain {
        primitive: &'static str,
        arg: f64,
        point: Vec<f64>,
    },

    #[error("non-finite value produced at point {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("metric is not positive definite at point {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("point {point:?} lies outside the chart domain of `{chart}`")]
    OutsideDomain { chart: String, point: Vec<f64> },

    #[error("finite-difference stencil leaves the chart domain at {point:?}")]
    StencilOutsideDomain { point: Vec<f64> },

    #[error("warping function must be positive: f({point:?}) = {value}")]
    NonpositiveWarping { point: Vec<f64>, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("hypothesis not satisfied: {0}")]
    HypothesisFailed(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
