use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("numerical consistency check failed: {0}")]
    Consistency(String),

    #[error("filter success probability vanishes ({0:e})")]
    DegenerateFilter(f64),

    #[error("rational function denominator vanishes at q={q}, xi={xi}")]
    Singular { q: f64, xi: f64 },

    #[error("Bell value crosses the local bound {crossings} times on the scanned interval")]
    MultiCrossing { crossings: usize, scan: Vec<(f64, f64)> },
}

pub type Result<T> = std::result::Result<T, Error>;
