//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any screenlab component.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("surface form {form:?} is declared by both {first:?} and {second:?}")]
    DuplicateSurfaceForm {
        form: String,
        first: String,
        second: String,
    },

    #[error("unknown concept id {0:?}")]
    UnknownConcept(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid encoding: {0}")]
    Encoding(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unembeddable document: no concepts and no residual tokens")]
    Unembeddable,

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("index is empty")]
    EmptyIndex,

    #[error("index has no neighbor graph; build it or use exact queries")]
    GraphAbsent,

    #[error("index file is corrupt: {0}")]
    CorruptIndex(String),

    #[error("unsupported index format version {0}")]
    FormatVersion(u16),

    #[error("pair id mismatch: {0}")]
    PairIdMismatch(String),

    #[error("calibration target unattainable: best achievable {best_achievable:.6} at threshold {at_threshold:.6}")]
    Unattainable {
        best_achievable: f64,
        at_threshold: f64,
    },

    #[error("embedding failed for pair {pair_id}: {source}")]
    ScreenAborted {
        pair_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("remote embedder error after {attempts} attempt(s): {message}")]
    Provider { attempts: u32, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
