//! Competency ontology: canonical concepts and their surface forms.
//!
//! The ontology is the ground truth shared by corpus generation, the keyword
//! screener fixtures, and the concept-space embedder. Every surface form
//! (synonym, acronym, title variant) maps to exactly one concept; homonyms
//! are rejected at load time so labels stay unambiguous.
//!
//! File format: line-oriented UTF-8. One record per line,
//!
//! ```text
//! id | canonical name | domain tag | synonym:a,b;acronym:c;title_variant:d
//! ```
//!
//! Lines starting with `#` are comments. A `#version=<string>` comment sets
//! the ontology version. Round-tripping load → serialize → load yields an
//! equal ontology.

use std::collections::HashMap;
use std::io::BufRead;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Bundled default ontology source (80 concepts across five domains).
const BUNDLED_SRC: &str = include_str!("../data/ontology.txt");

/// How a surface form relates to its concept's canonical name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantClass {
    Synonym,
    Acronym,
    TitleVariant,
}

impl VariantClass {
    pub const ALL: [VariantClass; 3] = [
        VariantClass::Synonym,
        VariantClass::Acronym,
        VariantClass::TitleVariant,
    ];

    pub fn label(self) -> &'static str {
        match self {
            VariantClass::Synonym => "synonym",
            VariantClass::Acronym => "acronym",
            VariantClass::TitleVariant => "title_variant",
        }
    }

    fn from_label(s: &str) -> Option<Self> {
        match s {
            "synonym" => Some(VariantClass::Synonym),
            "acronym" => Some(VariantClass::Acronym),
            "title_variant" => Some(VariantClass::TitleVariant),
            _ => None,
        }
    }
}

/// One canonical competency with its declared surface forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub id: String,
    pub canonical_name: String,
    pub domain_tag: String,
    /// Declared variant forms. The canonical name is retrievable too but is
    /// not repeated here.
    pub surface_forms: Vec<(String, VariantClass)>,
}

impl Concept {
    /// Forms of one variant class, in declaration order.
    pub fn forms_of(&self, class: VariantClass) -> Vec<&str> {
        self.surface_forms
            .iter()
            .filter(|(_, c)| *c == class)
            .map(|(f, _)| f.as_str())
            .collect()
    }
}

/// Case-fold, NFC-normalize, and collapse whitespace; the key space in which
/// all surface-form lookups happen.
pub fn fold_term(term: &str) -> String {
    term.nfc()
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// A detected concept mention inside a token stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    /// Index of the first token of the matched surface form.
    pub start: usize,
    /// Number of tokens the form spans.
    pub len: usize,
    pub concept_id: String,
}

/// Immutable concept universe. Safe to share across threads after load.
#[derive(Debug, Clone)]
pub struct Ontology {
    version: String,
    concepts: Vec<Concept>,
    /// folded surface form -> concept index
    lookup: HashMap<String, usize>,
    by_id: HashMap<String, usize>,
    max_form_tokens: usize,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.version == other.version && self.concepts == other.concepts
    }
}

impl Eq for Ontology {}

impl Ontology {
    /// Parse from a reader in the line format described in the module docs.
    pub fn load<R: BufRead>(reader: R) -> Result<Self> {
        let mut version = String::from("unversioned");
        let mut concepts: Vec<Concept> = Vec::new();

        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if let Some(v) = trimmed.strip_prefix("#version=") {
                version = v.trim().to_string();
                continue;
            }
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            concepts.push(parse_record(trimmed, line_no)?);
        }

        if concepts.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "ontology contains no concepts".into(),
            });
        }
        Self::from_concepts(version, concepts)
    }

    pub fn from_concepts(version: String, concepts: Vec<Concept>) -> Result<Self> {
        let mut lookup: HashMap<String, usize> = HashMap::new();
        let mut by_id: HashMap<String, usize> = HashMap::new();
        let mut max_form_tokens = 1;

        for (idx, concept) in concepts.iter().enumerate() {
            if by_id.insert(concept.id.clone(), idx).is_some() {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("duplicate concept id {:?}", concept.id),
                });
            }
            let mut forms: Vec<&str> = vec![concept.canonical_name.as_str()];
            forms.extend(concept.surface_forms.iter().map(|(f, _)| f.as_str()));
            for form in forms {
                let key = fold_term(form);
                if key.is_empty() {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!("empty surface form in concept {:?}", concept.id),
                    });
                }
                max_form_tokens = max_form_tokens.max(key.split(' ').count());
                if let Some(&prev) = lookup.get(&key) {
                    if prev != idx {
                        return Err(Error::DuplicateSurfaceForm {
                            form: key,
                            first: concepts[prev].id.clone(),
                            second: concept.id.clone(),
                        });
                    }
                } else {
                    lookup.insert(key, idx);
                }
            }
        }

        Ok(Self {
            version,
            concepts,
            lookup,
            by_id,
            max_form_tokens,
        })
    }

    /// The bundled default ontology. Parsed once per process.
    pub fn bundled() -> &'static Ontology {
        static CACHE: OnceLock<Ontology> = OnceLock::new();
        CACHE.get_or_init(|| {
            Ontology::load(BUNDLED_SRC.as_bytes()).expect("bundled ontology must parse")
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concept(&self, id: &str) -> Result<&Concept> {
        self.by_id
            .get(id)
            .map(|&i| &self.concepts[i])
            .ok_or_else(|| Error::UnknownConcept(id.to_string()))
    }

    /// Map a term to its owning concept id, if the term is a declared
    /// surface form. Matching is case- and whitespace-insensitive.
    pub fn canonicalize(&self, term: &str) -> Option<&str> {
        self.lookup
            .get(&fold_term(term))
            .map(|&i| self.concepts[i].id.as_str())
    }

    /// Declared forms of `class` for a concept. Empty when none are declared.
    pub fn surface_forms(&self, concept_id: &str, class: VariantClass) -> Result<Vec<&str>> {
        Ok(self.concept(concept_id)?.forms_of(class))
    }

    /// Concept ids grouped by domain tag, in declaration order.
    pub fn ids_by_domain(&self) -> Vec<(String, Vec<String>)> {
        let mut order: Vec<String> = Vec::new();
        let mut groups: HashMap<String, Vec<String>> = HashMap::new();
        for c in &self.concepts {
            if !groups.contains_key(&c.domain_tag) {
                order.push(c.domain_tag.clone());
            }
            groups
                .entry(c.domain_tag.clone())
                .or_default()
                .push(c.id.clone());
        }
        order
            .into_iter()
            .map(|d| {
                let ids = groups.remove(&d).unwrap_or_default();
                (d, ids)
            })
            .collect()
    }

    /// Greedy longest-match scan for surface forms over folded tokens.
    ///
    /// Matches never overlap; at each position the longest declared form
    /// wins, then the scan resumes after it. Tokens must already be folded
    /// (as produced by the ingest tokenizer).
    pub fn detect(&self, tokens: &[String]) -> Vec<Mention> {
        let mut mentions = Vec::new();
        let mut pos = 0;
        while pos < tokens.len() {
            let mut matched = 0;
            let max_n = self.max_form_tokens.min(tokens.len() - pos);
            for n in (1..=max_n).rev() {
                let key = tokens[pos..pos + n].join(" ");
                if let Some(&idx) = self.lookup.get(&key) {
                    mentions.push(Mention {
                        start: pos,
                        len: n,
                        concept_id: self.concepts[idx].id.clone(),
                    });
                    matched = n;
                    break;
                }
            }
            pos += if matched > 0 { matched } else { 1 };
        }
        mentions
    }

    /// Serialize back to the line format. `load(serialize(x))` equals `x`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("#version={}\n", self.version));
        for c in &self.concepts {
            let mut classes = String::new();
            for class in VariantClass::ALL {
                let forms = c.forms_of(class);
                if forms.is_empty() {
                    continue;
                }
                if !classes.is_empty() {
                    classes.push(';');
                }
                classes.push_str(class.label());
                classes.push(':');
                classes.push_str(&forms.join(","));
            }
            out.push_str(&format!(
                "{} | {} | {} | {}\n",
                c.id, c.canonical_name, c.domain_tag, classes
            ));
        }
        out
    }
}

fn parse_record(line: &str, line_no: usize) -> Result<Concept> {
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    if fields.len() != 4 {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected 4 '|'-separated fields, got {}", fields.len()),
        });
    }
    let (id, canonical, domain, classes) = (fields[0], fields[1], fields[2], fields[3]);
    if id.is_empty() || canonical.is_empty() || domain.is_empty() {
        return Err(Error::Parse {
            line: line_no,
            message: "id, canonical name, and domain tag must be non-empty".into(),
        });
    }

    let mut surface_forms = Vec::new();
    for entry in classes.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (class_label, forms) = entry.split_once(':').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("form entry {entry:?} is missing the class prefix"),
        })?;
        let class = VariantClass::from_label(class_label.trim()).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("unknown variant class {:?}", class_label.trim()),
        })?;
        for form in forms.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            surface_forms.push((form.to_string(), class));
        }
    }

    Ok(Concept {
        id: id.to_string(),
        canonical_name: canonical.to_string(),
        domain_tag: domain.to_string(),
        surface_forms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Ontology {
        let src = "\
#version=test-1
machine-learning | machine learning | software | synonym:statistical learning;acronym:ML;title_variant:machine learning engineer
python | Python | software | synonym:python programming;acronym:py
";
        Ontology::load(src.as_bytes()).unwrap()
    }

    #[test]
    fn canonicalize_declared_forms() {
        let ont = tiny();
        assert_eq!(ont.canonicalize("machine learning"), Some("machine-learning"));
        assert_eq!(ont.canonicalize("ML"), Some("machine-learning"));
        assert_eq!(ont.canonicalize("  Statistical   LEARNING "), Some("machine-learning"));
        assert_eq!(ont.canonicalize("underwater basket weaving"), None);
    }

    #[test]
    fn canonical_name_is_a_surface_form() {
        let ont = Ontology::bundled();
        for c in ont.concepts() {
            assert_eq!(ont.canonicalize(&c.canonical_name), Some(c.id.as_str()));
        }
    }

    #[test]
    fn surface_forms_by_class() {
        let ont = tiny();
        assert_eq!(
            ont.surface_forms("machine-learning", VariantClass::Acronym).unwrap(),
            vec!["ML"]
        );
        assert!(ont.surface_forms("python", VariantClass::TitleVariant).unwrap().is_empty());
        assert!(ont.surface_forms("nope", VariantClass::Synonym).is_err());
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        assert!(matches!(
            Ontology::load("".as_bytes()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn duplicate_surface_form_names_both_concepts() {
        let src = "\
a | alpha | d | acronym:ML
b | beta | d | acronym:ml
";
        match Ontology::load(src.as_bytes()) {
            Err(Error::DuplicateSurfaceForm { form, first, second }) => {
                assert_eq!(form, "ml");
                assert_eq!(first, "a");
                assert_eq!(second, "b");
            }
            other => panic!("expected duplicate-form error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_load_serialize_load() {
        let ont = Ontology::bundled();
        let text = ont.serialize();
        let again = Ontology::load(text.as_bytes()).unwrap();
        assert_eq!(*ont, again);
    }

    #[test]
    fn bundled_meets_size_contract() {
        let ont = Ontology::bundled();
        assert!(ont.len() >= 60, "bundled ontology has {} concepts", ont.len());
        let domains = ont.ids_by_domain();
        assert!(domains.len() >= 5, "bundled ontology has {} domains", domains.len());
        for c in ont.concepts() {
            // canonical plus at least one declared variant
            assert!(
                !c.surface_forms.is_empty(),
                "concept {} has no variant forms",
                c.id
            );
        }
    }

    #[test]
    fn detect_prefers_longest_match() {
        let ont = tiny();
        let tokens: Vec<String> = "we use machine learning engineer tools"
            .split_whitespace()
            .map(String::from)
            .collect();
        let mentions = ont.detect(&tokens);
        assert_eq!(mentions.len(), 1);
        assert_eq!(mentions[0].len, 3);
        assert_eq!(mentions[0].concept_id, "machine-learning");
    }

    #[test]
    fn no_cross_concept_token_prefixes_in_bundled() {
        // A form that extends another concept's form token-by-token would make
        // greedy detection depend on neighboring words; the bundled ontology
        // must not contain such pairs.
        let ont = Ontology::bundled();
        let mut forms: Vec<(Vec<String>, &str)> = Vec::new();
        for c in ont.concepts() {
            let mut all = vec![c.canonical_name.as_str()];
            all.extend(c.surface_forms.iter().map(|(f, _)| f.as_str()));
            for f in all {
                let toks: Vec<String> = fold_term(f).split(' ').map(String::from).collect();
                forms.push((toks, c.id.as_str()));
            }
        }
        for (fa, ca) in &forms {
            for (fb, cb) in &forms {
                if ca == cb || fa.len() >= fb.len() {
                    continue;
                }
                assert!(
                    fb[..fa.len()] != fa[..],
                    "form {:?} of {} is a token prefix of {:?} of {}",
                    fa,
                    ca,
                    fb,
                    cb
                );
            }
        }
    }
}
