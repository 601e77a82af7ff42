//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NotPrime(u64),

    #[error("invalid grid: N + l = {0} must be nonnegative")]
    InvalidGrid(i64),

    #[error("grid too large: {0} cells")]
    GridTooLarge(u128),

    #[error("sphere of radius q^{k} is not a union of cosets at resolution l = {l} (need l >= {min})")]
    InvalidSphereResolution { k: i64, l: i64, min: i64 },

    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("refine cannot shrink grid parameters: ({from_n}, {from_l}) -> ({to_n}, {to_l})")]
    ShrinkingRefine {
        from_n: i64,
        from_l: i64,
        to_n: i64,
        to_l: i64,
    },

    #[error("function is not in Phi: |mean integral| = {0:.3e}")]
    NotLizorkinPhi(f64),

    #[error("projection demands impossible on a table with {0} cosets")]
    ImpossibleProjection(usize),

    #[error("sphere resolution m = {m} insufficient, target requires m >= {required}")]
    InsufficientSphereResolution { m: i64, required: i64 },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("kappa = {0} outside the admissible range {1}")]
    InvalidKappa(f64, String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
