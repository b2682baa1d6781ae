use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum CapfieldError {
    #[error("dimension mismatch: expected ambient dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point does not lie on the sphere: |norm - 1| = {deviation:e}")]
    OffSphere { deviation: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("quadrature did not reach the requested tolerance: achieved {achieved:e}, requested {requested:e}")]
    QuadratureAccuracy { achieved: f64, requested: f64 },

    #[error("net list is missing level {0}")]
    MissingNetLevel(u32),

    #[error("net levels are not nested or not sorted by level")]
    BadNetFamily,

    #[error("operation requires measure mode, got function mode (or vice versa): {0}")]
    WrongMode(String),

    #[error("mixed-sign weights: {0}")]
    MixedSigns(String),

    #[error("gauge incompatibility: {0}")]
    GaugeIncompatible(String),

    #[error("series diverges on the truncated range: {0}")]
    DivergentSeries(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("resource estimate {estimate} exceeds limit {limit}; pass force to proceed")]
    ResourceLimit { estimate: u64, limit: u64 },

    #[error("unsupported schema version: {0}")]
    UnsupportedSchema(String),

    #[error("serialization: {0}")]
    Serialization(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CapfieldError>;
