use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data (tables, point files, configs) is malformed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested (kind, dim) pair has no implementation.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// A Fourier transform that must be positive was not.
    #[error("positivity violated: transform value {value:e} at |k| = {k}")]
    Positivity { k: f64, value: f64 },

    /// Image sum did not settle within the shell budget.
    #[error("periodization did not converge after {shells} shells")]
    DivergentPeriodization { shells: usize },

    /// A size cap (mode count, node budget, memory) would be exceeded.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    /// Exact evaluation is not available for the requested regime.
    #[error("exact evaluation unsupported: {0}")]
    UnsupportedExact(String),

    /// Floating point range exhausted despite rescaling.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Cached energy drifted from the recomputed value.
    #[error("energy drift {drift:e} exceeds guard")]
    EnergyDrift { drift: f64 },

    #[error("cache mismatch: {0}")]
    CacheMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
