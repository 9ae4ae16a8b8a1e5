use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series too short: {len} samples, at least {min} required")]
    TooShort { len: usize, min: usize },

    #[error("non-uniform time grid at index {index}: spacing {spacing} differs from dt = {expected}")]
    NonUniformGrid {
        index: usize,
        spacing: f64,
        expected: f64,
    },

    #[error("non-finite value in `{signal}` at index {index}")]
    NonFinite { signal: &'static str, index: usize },

    #[error("length mismatch in `{what}`: expected {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("shape mismatch: library has {rows} rows, target has {target} entries")]
    ShapeMismatch { rows: usize, target: usize },

    #[error("invalid excitation: {0}")]
    InvalidExcitation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown library preset `{0}` (expected `duhem-bouc-wen-poly` or `butterfly-aux`)")]
    UnknownPreset(String),

    #[error("simulation diverged at step {step} (t = {time})")]
    DivergedSimulation { step: usize, time: f64 },

    #[error("auxiliary signal y is required by this library but was not supplied")]
    MissingAux,

    #[error("model uses y terms but no auxiliary model was supplied")]
    MissingAuxModel,

    #[error("reference signal has zero norm")]
    ZeroReference,

    #[error("reference signal is constant")]
    ConstantReference,

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::TooShort { .. }
                | Error::InvalidExcitation(_)
                | Error::InvalidParameter(_)
                | Error::UnknownPreset(_)
                | Error::MissingAux
                | Error::MissingAuxModel
        )
    }
}
