use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mode index {index} outside 1..={n_max}")]
    ModeOutOfRange { index: usize, n_max: usize },

    #[error("position {x} outside the box [0, {length}]")]
    PositionOutOfRange { x: f64, length: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error(
        "norm {norm:.6e} fell below floor {floor} after kick {kick}; \
         the truncated basis is not valid for these parameters"
    )]
    NormFloorBreach { kick: usize, norm: f64, floor: f64 },

    #[error(
        "packet has no overlap with the positive-energy basis (captured fraction {captured:.3e})"
    )]
    EmptyProjection { captured: f64 },

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("series has {len} samples, at least {min} required")]
    SeriesTooShort { len: usize, min: usize },

    #[error("schedule mismatch: {0}")]
    ScheduleMismatch(String),

    #[error("malformed kick-matrix file: {0}")]
    KickMatrixFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
