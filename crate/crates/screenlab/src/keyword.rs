//! Deterministic keyword screening: the legacy-ATS control arm.
//!
//! Rules are compiled from a job's required concepts using canonical names
//! only — no synonym expansion. That exact-match brittleness is the behavior
//! under study, so it is deliberate, not an omission. A term matches only as
//! a contiguous token subsequence of the normalized document.

use serde::{Deserialize, Serialize};

use crate::corpus::JobSpec;
use crate::error::{Error, Result};
use crate::ingest::NormalizedDoc;
use crate::ontology::{fold_term, Ontology};
use crate::Decision;

/// How term matches aggregate into a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScoringMode {
    /// Binary presence per term.
    #[default]
    Presence,
    /// Occurrence count per term, capped at [`TF_CAP`].
    TermFrequency,
}

/// Occurrence cap for term-frequency scoring; keeps keyword stuffing from
/// dominating the score.
pub const TF_CAP: usize = 3;

/// One weighted term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    /// Hard terms gate the decision: all of them must be present.
    pub hard: bool,
    pub term: String,
    pub weight: f64,
}

impl Rule {
    fn tokens(&self) -> Vec<String> {
        fold_term(&self.term).split(' ').map(String::from).collect()
    }
}

/// Compiled keyword rules for one job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub mode: ScoringMode,
    pub rules: Vec<Rule>,
    pub threshold: f64,
}

/// Options controlling rule compilation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KeywordOptions {
    /// Fraction of terms (by concept id order) marked hard.
    pub hard_fraction: f64,
    pub default_weight: f64,
    pub threshold: f64,
    pub mode: ScoringMode,
}

impl Default for KeywordOptions {
    fn default() -> Self {
        Self {
            hard_fraction: 0.5,
            default_weight: 1.0,
            threshold: 0.75,
            mode: ScoringMode::Presence,
        }
    }
}

impl KeywordOptions {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "keyword threshold must be in [0,1], got {}",
                self.threshold
            )));
        }
        if !(0.0..=1.0).contains(&self.hard_fraction) {
            return Err(Error::Config("hard_fraction must be in [0,1]".into()));
        }
        if self.default_weight <= 0.0 {
            return Err(Error::Config("default_weight must be positive".into()));
        }
        Ok(())
    }
}

/// Compile one rule per required concept, canonical names only. The first
/// `ceil(hard_fraction * count)` terms in concept id order are hard.
pub fn compile_rules(job: &JobSpec, ontology: &Ontology, options: &KeywordOptions) -> Result<RuleSet> {
    options.validate()?;
    if job.required_concepts.is_empty() {
        return Err(Error::Config("job has no required concepts".into()));
    }
    let count = job.required_concepts.len();
    let hard_count = (options.hard_fraction * count as f64).ceil() as usize;

    let mut rules = Vec::with_capacity(count);
    // BTreeSet iteration is already concept-id order.
    for (i, concept_id) in job.required_concepts.iter().enumerate() {
        let concept = ontology.concept(concept_id)?;
        rules.push(Rule {
            hard: i < hard_count,
            term: concept.canonical_name.clone(),
            weight: options.default_weight,
        });
    }
    Ok(RuleSet {
        mode: options.mode,
        rules,
        threshold: options.threshold,
    })
}

/// Non-overlapping occurrences of `needle` as a contiguous subsequence.
fn count_occurrences(haystack: &[String], needle: &[String]) -> usize {
    if needle.is_empty() || haystack.len() < needle.len() {
        return 0;
    }
    let mut count = 0;
    let mut i = 0;
    while i + needle.len() <= haystack.len() {
        if haystack[i..i + needle.len()].iter().zip(needle).all(|(a, b)| a == b) {
            count += 1;
            i += needle.len();
        } else {
            i += 1;
        }
    }
    count
}

impl RuleSet {
    /// Weighted match score in `[0, 1]`.
    pub fn score(&self, doc: &NormalizedDoc) -> f64 {
        let total_weight: f64 = self.rules.iter().map(|r| r.weight).sum();
        if total_weight <= 0.0 {
            return 0.0;
        }
        let mut matched = 0.0;
        for rule in &self.rules {
            let count = count_occurrences(&doc.tokens, &rule.tokens());
            let contribution = match self.mode {
                ScoringMode::Presence => {
                    if count > 0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                ScoringMode::TermFrequency => count.min(TF_CAP) as f64 / TF_CAP as f64,
            };
            matched += rule.weight * contribution;
        }
        matched / total_weight
    }

    /// Advance iff every hard term is present and the score clears the
    /// threshold (inclusive).
    pub fn decide(&self, doc: &NormalizedDoc) -> Decision {
        let hard_ok = self
            .rules
            .iter()
            .filter(|r| r.hard)
            .all(|r| count_occurrences(&doc.tokens, &r.tokens()) > 0);
        if hard_ok && self.score(doc) >= self.threshold {
            Decision::Advance
        } else {
            Decision::Reject
        }
    }

    /// Canonical single-line JSON, for audit and replay files.
    pub fn to_json_line(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string(&value)?)
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        Ok(serde_json::from_str(line)?)
    }
}
