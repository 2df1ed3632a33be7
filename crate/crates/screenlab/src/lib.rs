//! # screenlab
//!
//! A matching-engine laboratory for applicant screening: generates a
//! synthetic, ground-truth-labeled resume–job corpus with controlled lexical
//! noise, runs a deterministic keyword screener and a semantic
//! cosine-similarity screener over it, and measures false-negative behavior,
//! threshold sensitivity, and noise robustness.
//!
//! Everything is seeded and reproducible: identical configuration and seed
//! produce byte-identical corpora, reports, and charts.

pub mod corpus;
pub mod error;
pub mod keyword;
pub mod ingest;
pub mod ontology;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};

/// Outcome of a screening decision for one candidate–job pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Advance,
    Reject,
}

