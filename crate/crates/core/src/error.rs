use std::path::PathBuf;

use thiserror::Error;

use crate::mode::Mode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode {mode} is not allowed here: {context}")]
    UnknownMode { mode: Mode, context: &'static str },

    #[error("post-selection annihilates state")]
    PostSelectionAnnihilates,

    #[error("polynomial is not homogeneous of degree {expected}")]
    NotHomogeneous { expected: usize },

    #[error("expected modes {expected:?}, found {found:?}")]
    ModeMismatch { expected: Vec<Mode>, found: Vec<Mode> },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("measurement basis for mode index {index} is not orthonormal")]
    NonOrthonormalBasis { index: usize },

    #[error("weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),

    #[error("grid has {points} points, at least {min} required")]
    GridTooSmall { points: usize, min: usize },

    #[error("grid angles must be finite and strictly increasing")]
    GridNotIncreasing,

    #[error("degenerate design matrix, sinusoid is not identifiable")]
    DegenerateFit,

    #[error("visibility undefined for non-positive fitted offset {offset}")]
    UndefinedVisibility { offset: f64 },

    #[error("promise violated: X+Y+Z+K = {sum} is odd")]
    PromiseViolated { sum: u32 },

    #[error("low-bit pattern {0} has odd parity")]
    OddParityPattern(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable, machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownMode { .. } => "unknown-mode",
            Error::PostSelectionAnnihilates => "postselection-empty",
            Error::NotHomogeneous { .. } => "not-homogeneous",
            Error::ModeMismatch { .. } => "mode-mismatch",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NotNormalized { .. } => "not-normalized",
            Error::NotUnitary { .. } => "not-unitary",
            Error::NonOrthonormalBasis { .. } => "non-orthonormal-basis",
            Error::WeightOutOfRange(_) => "weight-out-of-range",
            Error::GridTooSmall { .. } => "grid-too-small",
            Error::GridNotIncreasing => "grid-not-increasing",
            Error::DegenerateFit => "degenerate-fit",
            Error::UndefinedVisibility { .. } => "undefined-visibility",
            Error::PromiseViolated { .. } => "promise-violated",
            Error::OddParityPattern(_) => "odd-parity",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
