//! Synthetic labeled resume–job corpus with controlled lexical noise.
//!
//! Every pair carries a ground-truth competency profile; the qualified /
//! unqualified label comes from set coverage of the job's required concepts
//! and is untouched by perturbation, which only swaps surface forms within a
//! concept. Generation is a pure function of (ontology, config, seed): each
//! pair derives its own substream from the master seed, so parallel
//! generation is order-independent and corpora are byte-identical across
//! runs.
//!
//! Unqualified pairs come in two flavors, mixed 50/50: near-misses share part
//! of the required set (plus optional shallow "worked near it" mentions in
//! the text that never enter the profile), far-misses come from a different
//! domain entirely. Near-misses are what give the keyword screener's
//! precision something to lose.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::tokenize_line_spans;
use crate::ontology::{fold_term, Ontology, VariantClass};
use crate::rng::{splitmix64, SeededRng};

/// Ground-truth screening label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Qualified,
    Unqualified,
}

/// The competencies a synthetic candidate actually has.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetencyProfile {
    pub concept_ids: BTreeSet<String>,
    pub experience_sentences: Vec<String>,
}

/// A job posting: required and optional concepts plus rendered text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub required_concepts: BTreeSet<String>,
    pub optional_concepts: BTreeSet<String>,
    pub title_concept: String,
    pub text: String,
}

/// One surface-form swap applied by [`perturb`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationRecord {
    pub original_term: String,
    pub replacement_term: String,
    pub variant_class: VariantClass,
}

/// A labeled resume–job pair with generation provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPair {
    pub pair_id: String,
    pub resume_text: String,
    pub resume_profile: CompetencyProfile,
    pub job: JobSpec,
    pub label: Label,
    pub perturbation_log: Vec<PerturbationRecord>,
    pub seed: u64,
}

/// Class probabilities for label-preserving lexical noise.
///
/// Each concept mention runs independent per-class trials in the fixed order
/// synonym → acronym → title variant; the first success picks the replacement
/// class. Probabilities therefore need not sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseLevel {
    pub name: NoiseLevelName,
    pub p_synonym: f64,
    pub p_acronym: f64,
    pub p_title: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseLevelName {
    None,
    Low,
    Medium,
    High,
}

impl std::fmt::Display for NoiseLevelName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            NoiseLevelName::None => "none",
            NoiseLevelName::Low => "low",
            NoiseLevelName::Medium => "medium",
            NoiseLevelName::High => "high",
        };
        f.write_str(s)
    }
}

impl NoiseLevel {
    pub fn none() -> Self {
        Self { name: NoiseLevelName::None, p_synonym: 0.0, p_acronym: 0.0, p_title: 0.0 }
    }

    pub fn low() -> Self {
        Self { name: NoiseLevelName::Low, p_synonym: 0.10, p_acronym: 0.05, p_title: 0.05 }
    }

    pub fn medium() -> Self {
        Self { name: NoiseLevelName::Medium, p_synonym: 0.30, p_acronym: 0.15, p_title: 0.15 }
    }

    pub fn high() -> Self {
        Self { name: NoiseLevelName::High, p_synonym: 0.60, p_acronym: 0.30, p_title: 0.30 }
    }

    pub fn named(name: NoiseLevelName) -> Self {
        match name {
            NoiseLevelName::None => Self::none(),
            NoiseLevelName::Low => Self::low(),
            NoiseLevelName::Medium => Self::medium(),
            NoiseLevelName::High => Self::high(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (label, p) in [
            ("p_synonym", self.p_synonym),
            ("p_acronym", self.p_acronym),
            ("p_title", self.p_title),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{label} must be in [0,1], got {p}")));
            }
        }
        Ok(())
    }
}

/// Generator configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub n_pairs: usize,
    pub qualified_fraction: f64,
    /// Inclusive range for profile size (concepts per candidate).
    pub concepts_per_profile: [usize; 2],
    /// Inclusive range for required concepts per job.
    pub required_per_job: [usize; 2],
    /// Coverage of the required set needed to count as qualified.
    pub coverage_fraction: f64,
    pub noise: NoiseLevel,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n_pairs: 1000,
            qualified_fraction: 0.5,
            concepts_per_profile: [6, 9],
            required_per_job: [3, 5],
            coverage_fraction: 1.0,
            noise: NoiseLevel::medium(),
        }
    }
}

/// Optional concepts per job (inclusive bounds, not configurable).
const OPTIONAL_PER_JOB: (u64, u64) = (1, 2);

impl GenConfig {
    pub fn validate(&self, ontology: &Ontology) -> Result<()> {
        if self.n_pairs < 1 {
            return Err(Error::Config("n_pairs must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.qualified_fraction) {
            return Err(Error::Config("qualified_fraction must be in [0,1]".into()));
        }
        if !(0.0 < self.coverage_fraction && self.coverage_fraction <= 1.0) {
            return Err(Error::Config("coverage_fraction must be in (0,1]".into()));
        }
        for (label, [lo, hi]) in [
            ("concepts_per_profile", self.concepts_per_profile),
            ("required_per_job", self.required_per_job),
        ] {
            if lo < 1 || lo > hi {
                return Err(Error::Config(format!("{label} range [{lo},{hi}] is invalid")));
            }
        }
        self.noise.validate()?;

        // Worst case draw from one domain: job concepts plus profile fillers.
        let needed = self.required_per_job[1] + OPTIONAL_PER_JOB.1 as usize
            + self.concepts_per_profile[1];
        let domains = ontology.ids_by_domain();
        if domains.len() < 2 {
            return Err(Error::Config(
                "ontology must declare at least two domain tags".into(),
            ));
        }
        for (domain, ids) in &domains {
            if ids.len() + 1 < needed {
                return Err(Error::Config(format!(
                    "domain {domain:?} has {} concepts but up to {} are needed; \
                     shrink the profile/required ranges or extend the ontology",
                    ids.len(),
                    needed - 1
                )));
            }
        }
        Ok(())
    }
}

/// Ground-truth label rule: qualified iff the profile covers at least
/// `ceil(coverage_fraction * |required|)` of the job's required concepts.
pub fn label_rule(profile: &CompetencyProfile, job: &JobSpec, coverage_fraction: f64) -> Label {
    label_rule_sets(&profile.concept_ids, &job.required_concepts, coverage_fraction)
}

/// Set-level form of [`label_rule`], usable on corpus-file records.
pub fn label_rule_sets(
    profile: &BTreeSet<String>,
    required: &BTreeSet<String>,
    coverage_fraction: f64,
) -> Label {
    let overlap = profile.intersection(required).count();
    let needed = (coverage_fraction * required.len() as f64).ceil() as usize;
    if overlap >= needed.max(1) {
        Label::Qualified
    } else {
        Label::Unqualified
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PairKind {
    Qualified,
    NearMiss,
    FarMiss,
}

/// Deterministic stratified pair-kind schedule.
///
/// Pairs are split into two streams by index parity (the calibration/test
/// split used by evaluation); within each stream a Bresenham walk hits the
/// qualified fraction exactly and the unqualified alternate near/far. This
/// keeps label balance identical across both halves.
fn pair_kind(index: usize, fraction_millionths: u64) -> PairKind {
    let j = (index / 2) as u64;
    let q_before = j * fraction_millionths / 1_000_000;
    let q_after = (j + 1) * fraction_millionths / 1_000_000;
    if q_after > q_before {
        PairKind::Qualified
    } else {
        let unq_ordinal = (j + 1) - q_after;
        if unq_ordinal % 2 == 1 {
            PairKind::NearMiss
        } else {
            PairKind::FarMiss
        }
    }
}

const EXPERIENCE_TEMPLATES: [&str; 6] = [
    "Built production workflows around {} for three release cycles.",
    "Led a cross functional initiative centered on {}.",
    "Delivered measurable gains after adopting {} across the department.",
    "Owned the {} roadmap and its quarterly goals.",
    "Improved onboarding guides that document {} for new hires.",
    "Earned an internal certification in {} last spring.",
];

/// Shallow-contact sentences used for near-miss text mentions that are
/// deliberately absent from the ground-truth profile.
const EXPOSURE_TEMPLATES: [&str; 3] = [
    "Collaborated with the {} group on shared deliverables.",
    "Attended internal workshops covering {}.",
    "Supported a rollout of {} owned by a partner squad.",
];

const FIRST_NAMES: [&str; 8] = [
    "Jordan", "Casey", "Riley", "Morgan", "Taylor", "Avery", "Quinn", "Rowan",
];
const LAST_NAMES: [&str; 8] = [
    "Avery", "Whitfield", "Donovan", "Ashford", "Brennan", "Lockhart", "Mercer", "Castellano",
];

fn render_sentence(template: &str, form: &str) -> String {
    template.replacen("{}", form, 1)
}

/// Title-style mention for a concept: its first title variant, else the
/// canonical name.
fn title_form<'a>(ontology: &'a Ontology, concept_id: &str) -> &'a str {
    let concept = ontology.concept(concept_id).expect("known concept");
    concept
        .forms_of(VariantClass::TitleVariant)
        .first()
        .copied()
        .unwrap_or(concept.canonical_name.as_str())
}

fn canonical_name<'a>(ontology: &'a Ontology, concept_id: &str) -> &'a str {
    &ontology.concept(concept_id).expect("known concept").canonical_name
}

/// Sample `count` ids from `pool` excluding `taken`, in shuffled order.
fn sample_excluding(
    rng: &mut SeededRng,
    pool: &[String],
    taken: &BTreeSet<String>,
    count: usize,
) -> Vec<String> {
    let mut available: Vec<String> = pool
        .iter()
        .filter(|id| !taken.contains(*id))
        .cloned()
        .collect();
    rng.shuffle(&mut available);
    available.truncate(count);
    available
}

struct RenderedResume {
    text: String,
    sentences: Vec<String>,
}

fn render_resume(
    rng: &mut SeededRng,
    ontology: &Ontology,
    profile_order: &[String],
    exposure: &[String],
    primary: &str,
) -> RenderedResume {
    let first = FIRST_NAMES[rng.below(FIRST_NAMES.len() as u64) as usize];
    let last = LAST_NAMES[rng.below(LAST_NAMES.len() as u64) as usize];
    let email = format!("{}.{}@example.com", first.to_lowercase(), last.to_lowercase());
    let phone = format!("555-{:03}-{:04}", rng.below(1000), rng.below(10000));

    let mut sentences = Vec::new();
    for id in profile_order {
        let template = EXPERIENCE_TEMPLATES[rng.below(EXPERIENCE_TEMPLATES.len() as u64) as usize];
        sentences.push(render_sentence(template, canonical_name(ontology, id)));
    }
    let mut exposure_sentences = Vec::new();
    for id in exposure {
        let template = EXPOSURE_TEMPLATES[rng.below(EXPOSURE_TEMPLATES.len() as u64) as usize];
        exposure_sentences.push(render_sentence(template, canonical_name(ontology, id)));
    }

    let skills_line = profile_order
        .iter()
        .map(|id| canonical_name(ontology, id))
        .collect::<Vec<_>>()
        .join(", ");

    let mut text = String::new();
    text.push_str("== HEADER ==\n");
    text.push_str(&format!("{first} {last}\n"));
    text.push_str(&format!("{email} {phone}\n"));
    text.push_str(&format!(
        "Professional summary for a {}.\n",
        title_form(ontology, primary)
    ));
    text.push_str("== EXPERIENCE ==\n");
    for s in sentences.iter().chain(exposure_sentences.iter()) {
        text.push_str(s);
        text.push('\n');
    }
    text.push_str("== SKILLS ==\n");
    text.push_str(&skills_line);
    text.push('\n');

    RenderedResume { text, sentences }
}

fn render_job(
    ontology: &Ontology,
    domain: &str,
    title_concept: &str,
    required_order: &[String],
    optional_order: &[String],
) -> String {
    let mut text = String::new();
    text.push_str("== HEADER ==\n");
    text.push_str(&format!(
        "Seeking a {} to join our {} practice.\n",
        title_form(ontology, title_concept),
        domain
    ));
    text.push_str("== REQUIREMENTS ==\n");
    for id in required_order {
        text.push_str(&format!(
            "Must have hands on experience with {}.\n",
            canonical_name(ontology, id)
        ));
    }
    text.push_str("== PREFERRED ==\n");
    for id in optional_order {
        text.push_str(&format!(
            "Familiarity with {} is a plus.\n",
            canonical_name(ontology, id)
        ));
    }
    text
}

fn generate_pair(
    ontology: &Ontology,
    config: &GenConfig,
    master_seed: u64,
    index: usize,
    domains: &[(String, Vec<String>)],
) -> LabeledPair {
    let pair_seed = splitmix64(master_seed ^ splitmix64(index as u64));
    let mut rng = SeededRng::for_tag(pair_seed, "structure");
    let fraction_millionths = (config.qualified_fraction * 1_000_000.0).round() as u64;
    let kind = pair_kind(index, fraction_millionths);

    // Job: domain, required, optional.
    let domain_idx = rng.below(domains.len() as u64) as usize;
    let (domain, domain_ids) = &domains[domain_idx];
    let r = rng.range_inclusive(config.required_per_job[0] as u64, config.required_per_job[1] as u64)
        as usize;
    let o = rng.range_inclusive(OPTIONAL_PER_JOB.0, OPTIONAL_PER_JOB.1) as usize;
    let mut job_ids = sample_excluding(&mut rng, domain_ids, &BTreeSet::new(), r + o);
    let optional_order: Vec<String> = job_ids.split_off(r);
    let required_order = job_ids;
    let title_concept = required_order[0].clone();
    let required: BTreeSet<String> = required_order.iter().cloned().collect();
    let optional: BTreeSet<String> = optional_order.iter().cloned().collect();
    let job_taken: BTreeSet<String> = required.union(&optional).cloned().collect();

    let k_target = rng.range_inclusive(
        config.concepts_per_profile[0] as u64,
        config.concepts_per_profile[1] as u64,
    ) as usize;

    // Profile concepts by pair kind.
    let bar = (config.coverage_fraction * r as f64).ceil().max(1.0) as usize;
    let (profile_order, exposure): (Vec<String>, Vec<String>) = match kind {
        PairKind::Qualified => {
            let mut order: Vec<String> = required_order.clone();
            for id in &optional_order {
                if rng.bernoulli(0.5) {
                    order.push(id.clone());
                }
            }
            let k = k_target.max(order.len());
            let fillers = sample_excluding(&mut rng, domain_ids, &job_taken, k - order.len());
            order.extend(fillers);
            (order, Vec::new())
        }
        PairKind::NearMiss => {
            // Partial coverage: strictly below the qualification bar and at
            // most half the required set, so the score gap to qualified
            // pairs stays wide.
            let s_hi = (r / 2).min(bar.saturating_sub(1)).max(1).min(r - 1);
            let s = rng.range_inclusive(1, s_hi as u64) as usize;
            let mut shuffled = required_order.clone();
            rng.shuffle(&mut shuffled);
            let overlap: Vec<String> = shuffled[..s].to_vec();
            let missing: Vec<String> = shuffled[s..].to_vec();

            // Shallow text-only mentions of missing required concepts, capped
            // so total textual coverage stays at or below half the required
            // set.
            let cap = (r / 2).saturating_sub(s);
            let mut exposure = Vec::new();
            for id in &missing {
                if exposure.len() >= cap {
                    break;
                }
                if rng.bernoulli(0.5) {
                    exposure.push(id.clone());
                }
            }

            let mut order = overlap;
            let k = k_target.max(order.len());
            let fillers = sample_excluding(&mut rng, domain_ids, &job_taken, k - order.len());
            order.extend(fillers);
            (order, exposure)
        }
        PairKind::FarMiss => {
            let other_idx =
                (domain_idx + 1 + rng.below(domains.len() as u64 - 1) as usize) % domains.len();
            let (_, other_ids) = &domains[other_idx];
            let order = sample_excluding(&mut rng, other_ids, &BTreeSet::new(), k_target);
            (order, Vec::new())
        }
    };

    let primary = profile_order[0].clone();
    let resume = render_resume(&mut rng, ontology, &profile_order, &exposure, &primary);
    let job_text = render_job(ontology, domain, &title_concept, &required_order, &optional_order);

    let profile = CompetencyProfile {
        concept_ids: profile_order.iter().cloned().collect(),
        experience_sentences: resume.sentences,
    };
    let job = JobSpec {
        required_concepts: required,
        optional_concepts: optional,
        title_concept,
        text: job_text,
    };
    let label = label_rule(&profile, &job, config.coverage_fraction);

    let pair = LabeledPair {
        pair_id: format!("pair-{index:06}"),
        resume_text: resume.text,
        resume_profile: profile,
        job,
        label,
        perturbation_log: Vec::new(),
        seed: pair_seed,
    };
    let perturb_seed = splitmix64(pair_seed ^ crate::rng::fnv1a(b"perturb"));
    perturb(&pair, &config.noise, perturb_seed, ontology)
}

/// Generate the full corpus. Deterministic in (ontology, config, seed);
/// pairs are generated in parallel, each from its own seed substream.
pub fn generate_pairs(
    ontology: &Ontology,
    config: &GenConfig,
    seed: u64,
) -> Result<Vec<LabeledPair>> {
    config.validate(ontology)?;
    let domains = ontology.ids_by_domain();
    let pairs: Vec<LabeledPair> = (0..config.n_pairs)
        .into_par_iter()
        .map(|i| generate_pair(ontology, config, seed, i, &domains))
        .collect();
    Ok(pairs)
}

/// Apply label-preserving lexical noise to one pair's resume text.
///
/// Every detected concept mention independently samples a variant class per
/// the noise probabilities and is swapped for a same-concept surface form of
/// that class; concepts with no forms of the sampled class are left alone.
/// The profile and label are untouched. Deterministic in `seed`.
pub fn perturb(
    pair: &LabeledPair,
    noise: &NoiseLevel,
    seed: u64,
    ontology: &Ontology,
) -> LabeledPair {
    let mut rng = SeededRng::new(seed);
    let mut log = pair.perturbation_log.clone();
    let mut out_lines: Vec<String> = Vec::new();

    for line in pair.resume_text.lines() {
        if line.trim_start().starts_with("==") {
            out_lines.push(line.to_string());
            continue;
        }
        let tokens = tokenize_line_spans(line);
        let folded: Vec<String> = tokens.iter().map(|t| t.text.clone()).collect();
        let mentions = ontology.detect(&folded);

        // Decide replacements left-to-right (fixed RNG order), apply
        // right-to-left so byte spans stay valid.
        let mut edits: Vec<(usize, usize, String, PerturbationRecord)> = Vec::new();
        for mention in &mentions {
            let class = if rng.bernoulli(noise.p_synonym) {
                VariantClass::Synonym
            } else if rng.bernoulli(noise.p_acronym) {
                VariantClass::Acronym
            } else if rng.bernoulli(noise.p_title) {
                VariantClass::TitleVariant
            } else {
                continue;
            };
            let concept = ontology.concept(&mention.concept_id).expect("detected concept");
            let forms = concept.forms_of(class);
            if forms.is_empty() {
                continue;
            }
            let replacement = *rng.choose(&forms);
            let start = tokens[mention.start].start;
            let end = tokens[mention.start + mention.len - 1].end;
            let original = &line[start..end];
            if fold_term(replacement) == fold_term(original) {
                continue;
            }
            edits.push((
                start,
                end,
                replacement.to_string(),
                PerturbationRecord {
                    original_term: original.to_string(),
                    replacement_term: replacement.to_string(),
                    variant_class: class,
                },
            ));
        }

        let mut new_line = line.to_string();
        for (start, end, replacement, _) in edits.iter().rev() {
            new_line.replace_range(*start..*end, replacement);
        }
        log.extend(edits.into_iter().map(|(_, _, _, rec)| rec));
        out_lines.push(new_line);
    }

    let mut resume_text = out_lines.join("\n");
    if pair.resume_text.ends_with('\n') {
        resume_text.push('\n');
    }

    LabeledPair {
        resume_text,
        perturbation_log: log,
        ..pair.clone()
    }
}

/// Undo a perturbation log, recovering the canonical rendering.
///
/// Entries must be in the left-to-right order they were applied (as produced
/// by a single [`perturb`] pass); each is matched at the first occurrence at
/// or after the previous match.
pub fn reverse_perturbations(resume_text: &str, log: &[PerturbationRecord]) -> String {
    let mut lines: Vec<String> = resume_text.lines().map(String::from).collect();
    let mut line_idx = 0;
    let mut byte_cursor = 0;

    'entries: for record in log {
        while line_idx < lines.len() {
            let line = lines[line_idx].clone();
            if let Some((start, end)) =
                find_form(&line[byte_cursor..], &record.replacement_term)
            {
                let (abs_start, abs_end) = (byte_cursor + start, byte_cursor + end);
                lines[line_idx].replace_range(abs_start..abs_end, &record.original_term);
                byte_cursor = abs_start + record.original_term.len();
                continue 'entries;
            }
            line_idx += 1;
            byte_cursor = 0;
        }
        // Log does not match the text; leave the remainder untouched.
        break;
    }

    let mut out = lines.join("\n");
    if resume_text.ends_with('\n') {
        out.push('\n');
    }
    out
}

/// Byte span of the first token-aligned, case-insensitive occurrence of
/// `form` in `text`.
fn find_form(text: &str, form: &str) -> Option<(usize, usize)> {
    let tokens = tokenize_line_spans(text);
    let form_tokens: Vec<String> = tokenize_line_spans(form)
        .into_iter()
        .map(|t| t.text)
        .collect();
    if form_tokens.is_empty() || tokens.len() < form_tokens.len() {
        return None;
    }
    for i in 0..=(tokens.len() - form_tokens.len()) {
        if (0..form_tokens.len()).all(|j| tokens[i + j].text == form_tokens[j]) {
            return Some((tokens[i].start, tokens[i + form_tokens.len() - 1].end));
        }
    }
    None
}

/// Corpus interchange record: exactly the fields of the JSON Lines format,
/// declared alphabetically so serialization is canonical (sorted keys).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusPair {
    pub job_text: String,
    pub label: Label,
    pub pair_id: String,
    pub perturbation_log: Vec<PerturbationRecord>,
    pub profile_concepts: BTreeSet<String>,
    pub required_concepts: BTreeSet<String>,
    pub resume_text: String,
    pub seed: u64,
}

impl LabeledPair {
    pub fn to_corpus_pair(&self) -> CorpusPair {
        CorpusPair {
            job_text: self.job.text.clone(),
            label: self.label,
            pair_id: self.pair_id.clone(),
            perturbation_log: self.perturbation_log.clone(),
            profile_concepts: self.resume_profile.concept_ids.clone(),
            required_concepts: self.job.required_concepts.clone(),
            resume_text: self.resume_text.clone(),
            seed: self.seed,
        }
    }
}

impl CorpusPair {
    /// Canonical (pre-perturbation) resume rendering.
    pub fn canonical_resume_text(&self) -> String {
        reverse_perturbations(&self.resume_text, &self.perturbation_log)
    }
}

/// Write pairs as canonical JSON Lines.
pub fn write_corpus<W: Write>(pairs: &[CorpusPair], mut writer: W) -> Result<()> {
    for pair in pairs {
        // Through `Value` so maps render with sorted keys.
        let value = serde_json::to_value(pair)?;
        serde_json::to_writer(&mut writer, &value)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Read a JSON Lines corpus.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<CorpusPair>> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let pair: CorpusPair = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: idx + 1,
            message: format!("bad corpus record: {e}"),
        })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::Ontology;

    fn profile(ids: &[&str]) -> CompetencyProfile {
        CompetencyProfile {
            concept_ids: ids.iter().map(|s| s.to_string()).collect(),
            experience_sentences: Vec::new(),
        }
    }

    fn job(required: &[&str]) -> JobSpec {
        JobSpec {
            required_concepts: required.iter().map(|s| s.to_string()).collect(),
            optional_concepts: BTreeSet::new(),
            title_concept: required[0].to_string(),
            text: String::new(),
        }
    }

    #[test]
    fn label_rule_superset_qualifies() {
        let p = profile(&["a", "b", "c", "d"]);
        let j = job(&["a", "b", "c"]);
        assert_eq!(label_rule(&p, &j, 1.0), Label::Qualified);
    }

    #[test]
    fn label_rule_disjoint_never_qualifies() {
        let p = profile(&["x", "y"]);
        let j = job(&["a", "b", "c"]);
        for cf in [0.1, 0.5, 1.0] {
            assert_eq!(label_rule(&p, &j, cf), Label::Unqualified);
        }
    }

    #[test]
    fn label_rule_ceil_boundary() {
        // needs ceil(0.6 * 3) = 2 of {a,b,c}
        let p = profile(&["a", "b", "z"]);
        let j = job(&["a", "b", "c"]);
        assert_eq!(label_rule(&p, &j, 0.6), Label::Qualified);
        let p1 = profile(&["a", "z"]);
        assert_eq!(label_rule(&p1, &j, 0.6), Label::Unqualified);
    }

    #[test]
    fn default_config_generates_exact_balance() {
        let ont = Ontology::bundled();
        let pairs = generate_pairs(ont, &GenConfig::default(), 42).unwrap();
        assert_eq!(pairs.len(), 1000);
        let qualified = pairs.iter().filter(|p| p.label == Label::Qualified).count();
        assert!((480..=520).contains(&qualified), "{qualified} qualified");
        // Both parity halves carry the same balance.
        let even_q = pairs
            .iter()
            .enumerate()
            .filter(|(i, p)| i % 2 == 0 && p.label == Label::Qualified)
            .count();
        assert_eq!(even_q * 2, qualified);
    }

    #[test]
    fn single_pair_generation() {
        let ont = Ontology::bundled();
        let config = GenConfig { n_pairs: 1, ..GenConfig::default() };
        let pairs = generate_pairs(ont, &config, 7).unwrap();
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn oversized_profile_range_is_an_error() {
        let ont = Ontology::bundled();
        let config = GenConfig {
            concepts_per_profile: [40, 50],
            ..GenConfig::default()
        };
        assert!(matches!(
            generate_pairs(ont, &config, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn generation_is_deterministic() {
        let ont = Ontology::bundled();
        let config = GenConfig { n_pairs: 60, ..GenConfig::default() };
        let a = generate_pairs(ont, &config, 123).unwrap();
        let b = generate_pairs(ont, &config, 123).unwrap();
        assert_eq!(a, b);
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        write_corpus(&a.iter().map(|p| p.to_corpus_pair()).collect::<Vec<_>>(), &mut buf_a)
            .unwrap();
        write_corpus(&b.iter().map(|p| p.to_corpus_pair()).collect::<Vec<_>>(), &mut buf_b)
            .unwrap();
        assert_eq!(buf_a, buf_b);
    }

    #[test]
    fn noise_none_is_identity() {
        let ont = Ontology::bundled();
        let config = GenConfig { n_pairs: 20, noise: NoiseLevel::none(), ..GenConfig::default() };
        for pair in generate_pairs(ont, &config, 5).unwrap() {
            assert!(pair.perturbation_log.is_empty());
            let reperturbed = perturb(&pair, &NoiseLevel::none(), 99, ont);
            assert_eq!(reperturbed.resume_text, pair.resume_text);
        }
    }

    #[test]
    fn high_noise_perturbs_something() {
        let ont = Ontology::bundled();
        let config = GenConfig { n_pairs: 10, noise: NoiseLevel::high(), ..GenConfig::default() };
        let pairs = generate_pairs(ont, &config, 42).unwrap();
        assert!(pairs.iter().any(|p| !p.perturbation_log.is_empty()));
    }

    #[test]
    fn perturbation_preserves_labels_and_profiles() {
        let ont = Ontology::bundled();
        let config = GenConfig { n_pairs: 100, noise: NoiseLevel::high(), ..GenConfig::default() };
        for pair in generate_pairs(ont, &config, 11).unwrap() {
            assert_eq!(
                label_rule(&pair.resume_profile, &pair.job, config.coverage_fraction),
                pair.label
            );
        }
    }

    #[test]
    fn log_entries_are_same_concept_swaps() {
        let ont = Ontology::bundled();
        let config = GenConfig { n_pairs: 60, noise: NoiseLevel::high(), ..GenConfig::default() };
        for pair in generate_pairs(ont, &config, 13).unwrap() {
            for rec in &pair.perturbation_log {
                assert_eq!(
                    ont.canonicalize(&rec.original_term),
                    ont.canonicalize(&rec.replacement_term),
                    "{rec:?}"
                );
                assert!(ont.canonicalize(&rec.original_term).is_some());
            }
        }
    }

    #[test]
    fn reverse_recovers_canonical_text() {
        let ont = Ontology::bundled();
        let noisy = GenConfig { n_pairs: 60, noise: NoiseLevel::high(), ..GenConfig::default() };
        let clean = GenConfig { n_pairs: 60, noise: NoiseLevel::none(), ..GenConfig::default() };
        let noisy_pairs = generate_pairs(ont, &noisy, 77).unwrap();
        let clean_pairs = generate_pairs(ont, &clean, 77).unwrap();
        for (noisy_pair, clean_pair) in noisy_pairs.iter().zip(&clean_pairs) {
            let reversed =
                reverse_perturbations(&noisy_pair.resume_text, &noisy_pair.perturbation_log);
            assert_eq!(reversed, clean_pair.resume_text, "pair {}", noisy_pair.pair_id);
        }
    }

    #[test]
    fn noise_is_monotone_in_total_probability() {
        let ont = Ontology::bundled();
        let levels = [
            NoiseLevel::none(),
            NoiseLevel::low(),
            NoiseLevel::medium(),
            NoiseLevel::high(),
        ];
        let mut means = Vec::new();
        for level in levels {
            let mut total = 0usize;
            for seed in 0..100u64 {
                let config = GenConfig { n_pairs: 20, noise: level, ..GenConfig::default() };
                let pairs = generate_pairs(ont, &config, seed).unwrap();
                total += pairs.iter().map(|p| p.perturbation_log.len()).sum::<usize>();
            }
            means.push(total as f64 / 100.0);
        }
        for w in means.windows(2) {
            assert!(w[0] <= w[1], "perturbation counts not monotone: {means:?}");
        }
    }

    #[test]
    fn corpus_jsonl_round_trip_canonical() {
        let ont = Ontology::bundled();
        let config = GenConfig { n_pairs: 10, ..GenConfig::default() };
        let pairs: Vec<CorpusPair> = generate_pairs(ont, &config, 3)
            .unwrap()
            .iter()
            .map(|p| p.to_corpus_pair())
            .collect();
        let mut buf = Vec::new();
        write_corpus(&pairs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 10);
        // keys sorted in each record
        let first = text.lines().next().unwrap();
        let positions: Vec<usize> = [
            "\"job_text\"",
            "\"label\"",
            "\"pair_id\"",
            "\"perturbation_log\"",
            "\"profile_concepts\"",
            "\"required_concepts\"",
            "\"resume_text\"",
            "\"seed\"",
        ]
        .iter()
        .map(|k| first.find(k).expect(k))
        .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        let back = read_corpus(&buf[..]).unwrap();
        assert_eq!(back, pairs);
    }
}
