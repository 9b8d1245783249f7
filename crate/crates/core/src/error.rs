use thiserror::Error;

/// Errors surfaced by the solver and its harness-facing operations.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("incompatible interpolant resolution: {0}")]
    IncompatibleResolution(String),

    #[error("{system} system blew up at t = {t}: max |coefficient| = {max_mode:e}")]
    BlowUp {
        system: String,
        t: f64,
        max_mode: f64,
    },

    #[error("record is missing required column: {0}")]
    MissingColumn(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
