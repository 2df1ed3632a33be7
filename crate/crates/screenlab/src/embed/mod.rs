//! Semantic matching: documents → shared embedding space → cosine alignment.
//!
//! The built-in `concept_space` embedder is deliberately not a learned model.
//! It detects ontology surface forms in the token stream (n-grams up to the
//! longest declared form), maps each detected concept to a deterministic
//! pseudo-random unit vector keyed by `(model_seed, concept id)`, and adds a
//! small hashed character-trigram component for out-of-ontology residual
//! tokens. Two documents that express the same competencies through
//! different surface forms land on the same point, which is exactly the
//! semantic-equivalence property under test. Everything is integer-seeded
//! and transcendental-free, so vectors are bit-identical across platforms.
//!
//! A `remote` kind forwards to an HTTP provider (see [`remote`]) so a learned
//! model can be substituted without touching callers.

pub mod remote;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::NormalizedDoc;
use crate::ontology::Ontology;
use crate::rng::{fnv1a, SeededRng};
use crate::scalar::Scalar;
use crate::Decision;

/// Fixed-dimension embedding with a cached Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector<S: Scalar> {
    values: Vec<S>,
    norm: f64,
}

impl<S: Scalar> EmbeddingVector<S> {
    pub fn new(values: Vec<S>) -> Self {
        let norm = values.iter().map(|v| v.to_f64() * v.to_f64()).sum::<f64>().sqrt();
        Self { values, norm }
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }

    /// Copy scaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        let values = self
            .values
            .iter()
            .map(|v| S::from_f64(v.to_f64() / self.norm))
            .collect();
        Ok(Self::new(values))
    }
}

/// Which embedding routine to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EmbedderKind {
    #[default]
    ConceptSpace,
    NgramHash,
    Remote,
}

/// Embedder configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedderConfig {
    pub kind: EmbedderKind,
    pub dimension: usize,
    pub concept_weight: f64,
    pub ngram_weight: f64,
    pub provider_endpoint: Option<String>,
    pub model_seed: u64,
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        Self {
            kind: EmbedderKind::ConceptSpace,
            dimension: 256,
            concept_weight: 1.0,
            ngram_weight: 0.1,
            provider_endpoint: None,
            model_seed: 0xE3BEDDED,
        }
    }
}

impl EmbedderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::Config("embedder dimension must be positive".into()));
        }
        match self.kind {
            EmbedderKind::Remote => {
                if self.provider_endpoint.is_none() {
                    return Err(Error::Config(
                        "remote embedder requires provider_endpoint".into(),
                    ));
                }
            }
            _ => {
                if self.concept_weight < 0.0 || self.ngram_weight < 0.0 {
                    return Err(Error::Config("embedder weights must be non-negative".into()));
                }
                if self.concept_weight + self.ngram_weight <= 0.0 {
                    return Err(Error::Config(
                        "concept_weight + ngram_weight must be positive".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Deterministic pseudo-random unit vector for one concept.
///
/// Components are uniform in [-1, 1) from the concept's own seed substream,
/// then scaled to unit length; only `sqrt` and division touch floating point,
/// both exactly rounded under IEEE 754.
fn concept_unit_vector(model_seed: u64, concept_id: &str, dimension: usize) -> Vec<f64> {
    let mut rng = SeededRng::for_tag(model_seed, concept_id);
    loop {
        let raw: Vec<f64> = (0..dimension).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            return raw.iter().map(|v| v / norm).collect();
        }
    }
}

/// Accumulate hashed character trigrams of `token` into `acc` with ±1 signs.
fn hash_trigrams(token: &str, acc: &mut [f64]) {
    let padded: Vec<char> = std::iter::once('^')
        .chain(token.chars())
        .chain(std::iter::once('$'))
        .collect();
    if padded.len() < 3 {
        return;
    }
    let mut buf = String::new();
    for window in padded.windows(3) {
        buf.clear();
        buf.extend(window);
        let h = fnv1a(buf.as_bytes());
        let bucket = (h % acc.len() as u64) as usize;
        let sign = if (h >> 32) & 1 == 0 { 1.0 } else { -1.0 };
        acc[bucket] += sign;
    }
}

/// L2-normalized trigram vector of `tokens`; zero vector when empty.
fn trigram_vector(tokens: &[&str], dimension: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dimension];
    for token in tokens {
        hash_trigrams(token, &mut acc);
    }
    let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in &mut acc {
            *v /= norm;
        }
    }
    acc
}

/// Concepts detected in a document plus the tokens outside any mention.
pub fn detect_concepts<'a>(
    doc: &'a NormalizedDoc,
    ontology: &Ontology,
) -> (BTreeSet<String>, Vec<&'a str>) {
    let mentions = ontology.detect(&doc.tokens);
    let mut covered = vec![false; doc.tokens.len()];
    let mut concepts = BTreeSet::new();
    for m in &mentions {
        concepts.insert(m.concept_id.clone());
        for flag in covered.iter_mut().skip(m.start).take(m.len) {
            *flag = true;
        }
    }
    let residual = doc
        .tokens
        .iter()
        .zip(&covered)
        .filter(|(_, &c)| !c)
        .map(|(t, _)| t.as_str())
        .collect();
    (concepts, residual)
}

/// Embed a normalized document. Deterministic for local kinds.
pub fn embed<S: Scalar>(
    doc: &NormalizedDoc,
    ontology: &Ontology,
    config: &EmbedderConfig,
) -> Result<EmbeddingVector<S>> {
    config.validate()?;
    match config.kind {
        EmbedderKind::ConceptSpace => {
            let (concepts, residual) = detect_concepts(doc, ontology);
            embed_from_parts(&concepts, &residual, config)
        }
        EmbedderKind::NgramHash => {
            let residual: Vec<&str> = doc.tokens.iter().map(String::as_str).collect();
            embed_from_parts(&BTreeSet::new(), &residual, config)
        }
        EmbedderKind::Remote => {
            let endpoint = config.provider_endpoint.as_deref().expect("validated");
            let client = remote::RemoteEmbedder::new(endpoint, config.dimension);
            let text = doc.tokens.join(" ");
            let mut vectors = client.embed_batch(&[text])?;
            let raw = vectors.pop().expect("length-checked response");
            let vector =
                EmbeddingVector::new(raw.into_iter().map(S::from_f64).collect::<Vec<S>>());
            if vector.is_zero() {
                return Err(Error::Unembeddable);
            }
            Ok(vector)
        }
    }
}

fn embed_from_parts<S: Scalar>(
    concepts: &BTreeSet<String>,
    residual: &[&str],
    config: &EmbedderConfig,
) -> Result<EmbeddingVector<S>> {
    let mut acc = vec![0.0f64; config.dimension];

    if config.concept_weight > 0.0 {
        for concept_id in concepts {
            let unit = concept_unit_vector(config.model_seed, concept_id, config.dimension);
            for (a, u) in acc.iter_mut().zip(&unit) {
                *a += config.concept_weight * u;
            }
        }
    }
    if config.ngram_weight > 0.0 && !residual.is_empty() {
        let tri = trigram_vector(residual, config.dimension);
        for (a, t) in acc.iter_mut().zip(&tri) {
            *a += config.ngram_weight * t;
        }
    }

    let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Unembeddable);
    }
    let values: Vec<S> = acc.iter().map(|v| S::from_f64(v / norm)).collect();
    Ok(EmbeddingVector::new(values))
}

/// Cosine similarity, clamped to `[-1, 1]` against floating-point overshoot.
pub fn cosine<S: Scalar>(a: &EmbeddingVector<S>, b: &EmbeddingVector<S>) -> Result<f64> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch {
            expected: a.dimension(),
            actual: b.dimension(),
        });
    }
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroVector);
    }
    let dot: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x.to_f64() * y.to_f64())
        .sum();
    Ok((dot / (a.norm * b.norm)).clamp(-1.0, 1.0))
}

/// Threshold decision over a similarity score; ties advance, matching the
/// keyword screener's tie rule.
pub fn decide_semantic(score: f64, theta: f64) -> Result<Decision> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(Error::Config(format!(
            "semantic threshold must be in [-1,1], got {theta}"
        )));
    }
    if score >= theta {
        Ok(Decision::Advance)
    } else {
        Ok(Decision::Reject)
    }
}
