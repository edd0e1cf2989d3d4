use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e} exceeds {tolerance:.1e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("rank-deficient system (condition estimate {cond_estimate:.3e})")]
    RankDeficient { cond_estimate: f64 },

    #[error("unsupported dimension n = {n}: {reason}")]
    UnsupportedDimension { n: usize, reason: String },

    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("square-root measurement undefined for beta1 = 0 (ancilla decoupled)")]
    DecoupledAncilla,

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("transcript has no sifted rounds")]
    NoSiftedRounds,

    #[error("transcript was produced without eavesdropper outcomes")]
    EveDisabled,

    #[error("tomography input misses coverage: {0}")]
    MissingCoverage(String),

    #[error("invalid state matrix: {0}")]
    InvalidState(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
