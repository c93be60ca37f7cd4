use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad user input: malformed config, unknown keys, invalid parameters.
    Config,
    /// An operation was called outside its contract (mismatched rings,
    /// overlapping regions, identity measurements, ...).
    Contract,
    /// A numerical procedure failed to produce a usable result.
    Numerical,
    /// Anything else (I/O and friends).
    Other,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring length mismatch: {0} vs {1}")]
    RingMismatch(usize, usize),
    #[error("ring length must be at least 1")]
    EmptyRing,
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("cannot measure the identity operator")]
    IdentityMeasurement,
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("regions overlap")]
    OverlappingRegions,
    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),
    #[error("invalid range distribution: {0}")]
    InvalidRange(String),
    #[error("ensemble support size {support} exceeds enumeration cap {cap}")]
    SupportTooLarge { support: u128, cap: u128 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dense state supports at most {max} qubits, got {got}")]
    DenseTooLarge { got: usize, max: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            Config(_) | Parse(_) | InvalidProbabilities(_) | InvalidRange(_) => {
                ErrorCategory::Config
            }
            RingMismatch(..) | EmptyRing | InvalidOperator(_) | IdentityMeasurement
            | InvalidRegion(_) | OverlappingRegions | SupportTooLarge { .. }
            | InsufficientData(_) | DenseTooLarge { .. } => ErrorCategory::Contract,
            Numerical(_) => ErrorCategory::Numerical,
            Io(_) | Json(_) => ErrorCategory::Other,
        }
    }
}
