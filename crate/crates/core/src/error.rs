use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input range that contains nothing to work on, e.g. sieving below 2.
    #[error("empty domain: {0}")]
    EmptyDomain(String),

    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integer product that does not fit in 64 bits.
    #[error("integer overflow: {0}")]
    Overflow(String),

    /// An invalid or inconsistent run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// The propagated state left the unit sphere by more than the tolerance.
    #[error("norm drift {drift:e} exceeds tolerance {tolerance:e} at t = {time}")]
    NormDrift { drift: f64, tolerance: f64, time: f64 },

    /// Every measurement shot landed on the vacuum.
    #[error("measurement inconclusive: all {shots} shots landed on the vacuum")]
    Inconclusive { shots: u64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
