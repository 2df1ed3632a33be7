//! Document ingestion: extraction, normalization, and PII masking.
//!
//! Both screening pipelines consume the same [`NormalizedDoc`]: case-folded
//! NFC tokens split at Unicode word boundaries (hyphens stay inside tokens,
//! emails and URLs survive as single tokens), consecutive duplicate lines
//! dropped, and `== HEADING ==` markers turned into section spans.
//!
//! PII masking is deterministic and rule-based: token patterns for emails,
//! URLs, and phone numbers plus a name list. Every match is replaced by a
//! single `[PII:<class>]` placeholder token, which downstream embedders treat
//! as an out-of-ontology token.

use std::collections::BTreeSet;
use std::io::BufRead;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

use crate::error::{Error, Result};

/// Bundled default PII rules.
const BUNDLED_RULES: &str = include_str!("../data/pii_rules.txt");

/// Supported raw input formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// Plain UTF-8 text.
    Plain,
    /// Plain UTF-8 text that uses `== HEADING ==` section markers.
    Sectioned,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(InputFormat::Plain),
            "sectioned" => Ok(InputFormat::Sectioned),
            other => Err(Error::Config(format!("unknown input format {other:?}"))),
        }
    }
}

/// Decode raw bytes into text, preserving section markers.
pub fn extract_text(input: &[u8], _format: InputFormat) -> Result<String> {
    std::str::from_utf8(input)
        .map(str::to_owned)
        .map_err(|e| Error::Encoding(e.to_string()))
}

/// Section labels recognized in normalized documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionLabel {
    Header,
    Experience,
    Skills,
    Education,
    Other,
}

impl SectionLabel {
    fn from_marker(label: &str) -> Self {
        match label {
            "header" => SectionLabel::Header,
            "experience" => SectionLabel::Experience,
            "skills" => SectionLabel::Skills,
            "education" => SectionLabel::Education,
            _ => SectionLabel::Other,
        }
    }

    pub fn marker_text(self) -> &'static str {
        match self {
            SectionLabel::Header => "HEADER",
            SectionLabel::Experience => "EXPERIENCE",
            SectionLabel::Skills => "SKILLS",
            SectionLabel::Education => "EDUCATION",
            SectionLabel::Other => "OTHER",
        }
    }
}

/// Token span `[start, end)` carrying a section label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub label: SectionLabel,
    pub start: usize,
    pub end: usize,
}

/// PII categories handled by the masking rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiiClass {
    Email,
    Phone,
    Url,
    Name,
}

impl PiiClass {
    pub fn label(self) -> &'static str {
        match self {
            PiiClass::Email => "email",
            PiiClass::Phone => "phone",
            PiiClass::Url => "url",
            PiiClass::Name => "name",
        }
    }

    pub fn placeholder(self) -> String {
        format!("[PII:{}]", self.label())
    }

    fn from_label(s: &str) -> Option<Self> {
        match s {
            "email" => Some(PiiClass::Email),
            "phone" => Some(PiiClass::Phone),
            "url" => Some(PiiClass::Url),
            "name" => Some(PiiClass::Name),
            _ => None,
        }
    }
}

/// A masked region: one placeholder token in the output document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedSpan {
    /// Placeholder token index in the masked document.
    pub index: usize,
    /// How many original tokens the match covered.
    pub original_len: usize,
    pub class: PiiClass,
}

/// Tokenized, segmented, optionally PII-masked document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalizedDoc {
    pub tokens: Vec<String>,
    pub sections: Vec<Section>,
    pub masked_spans: Vec<MaskedSpan>,
}

impl NormalizedDoc {
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Render back to marker-delimited text: one marker line and one token
    /// line per section. `normalize(render(d)) == d` for unmasked docs.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push_str(&format!("== {} ==\n", s.label.marker_text()));
            if s.end > s.start {
                out.push_str(&self.tokens[s.start..s.end].join(" "));
                out.push('\n');
            }
        }
        out
    }
}

static EMAIL_PROTECT: OnceLock<Regex> = OnceLock::new();
static URL_PROTECT: OnceLock<Regex> = OnceLock::new();
static MARKER: OnceLock<Regex> = OnceLock::new();

fn email_protect() -> &'static Regex {
    EMAIL_PROTECT.get_or_init(|| {
        Regex::new(r"[A-Za-z0-9][A-Za-z0-9._%+-]*@[A-Za-z0-9.-]+\.[A-Za-z]{2,}").unwrap()
    })
}

fn url_protect() -> &'static Regex {
    URL_PROTECT.get_or_init(|| Regex::new(r"(?:https?://|www\.)[^\s,;]+").unwrap())
}

fn marker_re() -> &'static Regex {
    MARKER.get_or_init(|| Regex::new(r"^==\s*(.+?)\s*==$").unwrap())
}

/// Fold one token: NFC then lowercase.
fn fold_token(tok: &str) -> String {
    tok.nfc().collect::<String>().to_lowercase()
}

/// A folded token with its byte span in the source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannedToken {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Tokenize one line, reporting each token's byte span. Emails and URLs are
/// kept whole; elsewhere, Unicode word boundaries apply with `-` joining
/// adjacent word segments so `scikit-learn` and `555-0142` stay one token.
pub fn tokenize_line_spans(line: &str) -> Vec<SpannedToken> {
    // Protect emails first (an email also matches the URL pattern's tail).
    let mut protected: Vec<(usize, usize)> = Vec::new();
    for m in email_protect().find_iter(line) {
        protected.push((m.start(), m.end()));
    }
    for m in url_protect().find_iter(line) {
        if !protected.iter().any(|&(s, e)| m.start() < e && m.end() > s) {
            protected.push((m.start(), m.end()));
        }
    }
    protected.sort_by_key(|&(s, _)| s);

    let mut tokens = Vec::new();
    let mut cursor = 0;
    for (start, end) in protected {
        tokenize_words(&line[cursor..start], cursor, &mut tokens);
        tokens.push(SpannedToken {
            text: fold_token(&line[start..end]),
            start,
            end,
        });
        cursor = end;
    }
    tokenize_words(&line[cursor..], cursor, &mut tokens);
    tokens
}

fn tokenize_line(line: &str) -> Vec<String> {
    tokenize_line_spans(line).into_iter().map(|t| t.text).collect()
}

fn tokenize_words(text: &str, base: usize, out: &mut Vec<SpannedToken>) {
    let is_word = |s: &str| s.chars().any(char::is_alphanumeric);
    let mut segments: Vec<(usize, &str)> = Vec::new();
    let mut offset = 0;
    for seg in text.split_word_bounds() {
        segments.push((offset, seg));
        offset += seg.len();
    }
    let mut i = 0;
    while i < segments.len() {
        let (seg_start, seg) = segments[i];
        if !is_word(seg) {
            i += 1;
            continue;
        }
        let mut token = seg.to_string();
        let start = seg_start;
        let mut end = seg_start + seg.len();
        i += 1;
        while i + 1 < segments.len() && segments[i].1 == "-" && is_word(segments[i + 1].1) {
            token.push('-');
            token.push_str(segments[i + 1].1);
            end = segments[i + 1].0 + segments[i + 1].1.len();
            i += 2;
        }
        out.push(SpannedToken {
            text: fold_token(&token),
            start: base + start,
            end: base + end,
        });
    }
}

/// Normalize raw text into tokens and section spans.
///
/// Consecutive exactly-duplicate lines are dropped before tokenization; this
/// is the only de-duplication performed, so repeated skills inside distinct
/// lines survive.
pub fn normalize(raw: &str) -> NormalizedDoc {
    let mut lines: Vec<&str> = Vec::new();
    let mut prev: Option<&str> = None;
    for line in raw.lines() {
        if prev == Some(line) {
            continue;
        }
        lines.push(line);
        prev = Some(line);
    }

    let mut tokens: Vec<String> = Vec::new();
    let mut sections: Vec<Section> = Vec::new();
    let mut current: Option<(SectionLabel, usize)> = None;

    for line in lines {
        if let Some(caps) = marker_re().captures(line.trim()) {
            if let Some((label, start)) = current.take() {
                sections.push(Section {
                    label,
                    start,
                    end: tokens.len(),
                });
            }
            let label = SectionLabel::from_marker(&fold_token(&caps[1]));
            current = Some((label, tokens.len()));
            continue;
        }
        let line_tokens = tokenize_line(line);
        if line_tokens.is_empty() {
            continue;
        }
        if current.is_none() {
            current = Some((SectionLabel::Other, tokens.len()));
        }
        tokens.extend(line_tokens);
    }
    if let Some((label, start)) = current.take() {
        sections.push(Section {
            label,
            start,
            end: tokens.len(),
        });
    }

    NormalizedDoc {
        tokens,
        sections,
        masked_spans: Vec::new(),
    }
}

/// PII masking rules: token-level regex patterns plus a literal name list.
#[derive(Debug, Clone)]
pub struct PiiRules {
    pub version: String,
    patterns: Vec<(PiiClass, Regex)>,
    name_list: BTreeSet<String>,
    /// Longest name entry, in tokens.
    max_name_tokens: usize,
}

impl PiiRules {
    /// Parse from the comment-tolerant `class | value` line format.
    pub fn load<R: BufRead>(reader: R) -> Result<Self> {
        let mut version = String::from("unversioned");
        let mut patterns = Vec::new();
        let mut name_list = BTreeSet::new();

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
            let (class, value) = trimmed.split_once('|').ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected 'class | value'".into(),
            })?;
            let class = PiiClass::from_label(class.trim()).ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("unknown pii class {:?}", class.trim()),
            })?;
            match class {
                PiiClass::Name => {
                    for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        name_list.insert(
                            name.split_whitespace()
                                .map(fold_token)
                                .collect::<Vec<_>>()
                                .join(" "),
                        );
                    }
                }
                _ => {
                    let re = Regex::new(value.trim()).map_err(|e| Error::Parse {
                        line: line_no,
                        message: format!("bad pattern: {e}"),
                    })?;
                    patterns.push((class, re));
                }
            }
        }

        if patterns.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "pii rule set declares no patterns".into(),
            });
        }
        let max_name_tokens = name_list
            .iter()
            .map(|n| n.split(' ').count())
            .max()
            .unwrap_or(1);
        Ok(Self {
            version,
            patterns,
            name_list,
            max_name_tokens,
        })
    }

    /// The default rules shipped with the crate.
    pub fn bundled() -> &'static PiiRules {
        static CACHE: OnceLock<PiiRules> = OnceLock::new();
        CACHE.get_or_init(|| {
            PiiRules::load(BUNDLED_RULES.as_bytes()).expect("bundled pii rules must parse")
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.name_list.iter().map(String::as_str)
    }

    /// Length in tokens of a match starting at `pos`, with its class.
    fn match_at(&self, tokens: &[String], pos: usize) -> Option<(usize, PiiClass)> {
        let max_n = self.max_name_tokens.min(tokens.len() - pos);
        for n in (1..=max_n).rev() {
            let key = tokens[pos..pos + n].join(" ");
            if self.name_list.contains(&key) {
                return Some((n, PiiClass::Name));
            }
        }
        for (class, re) in &self.patterns {
            if re.is_match(&tokens[pos]) {
                return Some((1, *class));
            }
        }
        None
    }

    /// Count of rule matches in a document; zero means fully masked.
    pub fn scan_count(&self, doc: &NormalizedDoc) -> usize {
        let mut count = 0;
        let mut pos = 0;
        while pos < doc.tokens.len() {
            if let Some((len, _)) = self.match_at(&doc.tokens, pos) {
                count += 1;
                pos += len;
            } else {
                pos += 1;
            }
        }
        count
    }
}

/// Replace every rule match with a `[PII:<class>]` placeholder token.
///
/// Matches are found per section so a multi-token name cannot straddle a
/// section boundary; section spans are re-based to the masked token stream.
pub fn mask_pii(doc: &NormalizedDoc, rules: &PiiRules) -> NormalizedDoc {
    let mut tokens: Vec<String> = Vec::new();
    let mut sections: Vec<Section> = Vec::new();
    let mut masked_spans: Vec<MaskedSpan> = doc.masked_spans.clone();

    for section in &doc.sections {
        let start = tokens.len();
        let mut pos = section.start;
        while pos < section.end {
            match rules.match_at(&doc.tokens[..section.end], pos) {
                Some((len, class)) => {
                    masked_spans.push(MaskedSpan {
                        index: tokens.len(),
                        original_len: len,
                        class,
                    });
                    tokens.push(class.placeholder());
                    pos += len;
                }
                None => {
                    tokens.push(doc.tokens[pos].clone());
                    pos += 1;
                }
            }
        }
        sections.push(Section {
            label: section.label,
            start,
            end: tokens.len(),
        });
    }

    NormalizedDoc {
        tokens,
        sections,
        masked_spans,
    }
}

/// Convenience: extract, normalize, and mask in one step.
pub fn ingest(raw: &str, rules: &PiiRules) -> NormalizedDoc {
    mask_pii(&normalize(raw), rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extract_plain_passthrough() {
        assert_eq!(extract_text(b"hello", InputFormat::Plain).unwrap(), "hello");
    }

    #[test]
    fn extract_preserves_markers() {
        let text = extract_text(b"== SKILLS ==\npython", InputFormat::Sectioned).unwrap();
        assert!(text.contains("== SKILLS =="));
    }

    #[test]
    fn extract_rejects_invalid_utf8() {
        assert!(matches!(
            extract_text(&[0xff, 0xfe, 0x41], InputFormat::Plain),
            Err(Error::Encoding(_))
        ));
    }

    #[test]
    fn dedup_is_line_level_not_token_level() {
        let doc = normalize("Python  PYTHON python");
        assert_eq!(doc.tokens, vec!["python", "python", "python"]);
    }

    #[test]
    fn consecutive_duplicate_lines_removed() {
        let doc = normalize("led a team\nled a team\nled a team\nshipped code");
        assert_eq!(
            doc.tokens,
            vec!["led", "a", "team", "shipped", "code"]
        );
    }

    #[test]
    fn hyphen_stays_in_token() {
        let doc = normalize("used scikit-learn and 555-014-2233 daily");
        assert!(doc.tokens.contains(&"scikit-learn".to_string()));
        assert!(doc.tokens.contains(&"555-014-2233".to_string()));
    }

    #[test]
    fn email_is_one_token() {
        let doc = normalize("contact jane.doe@example.com today");
        assert_eq!(
            doc.tokens,
            vec!["contact", "jane.doe@example.com", "today"]
        );
    }

    #[test]
    fn sections_partition_tokens() {
        let doc = normalize("intro line\n== SKILLS ==\npython, sql\n== EXPERIENCE ==\nbuilt things");
        assert_eq!(doc.sections.len(), 3);
        assert_eq!(doc.sections[0].label, SectionLabel::Other);
        assert_eq!(doc.sections[1].label, SectionLabel::Skills);
        assert_eq!(doc.sections[2].label, SectionLabel::Experience);
        assert_eq!(doc.sections[0].start, 0);
        for w in doc.sections.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        assert_eq!(doc.sections.last().unwrap().end, doc.tokens.len());
    }

    #[test]
    fn unknown_marker_maps_to_other() {
        let doc = normalize("== REQUIREMENTS ==\nmust have sql");
        assert_eq!(doc.sections[0].label, SectionLabel::Other);
    }

    #[test]
    fn empty_input_empty_doc() {
        let doc = normalize("");
        assert!(doc.is_empty());
        assert!(doc.sections.is_empty());
    }

    #[test]
    fn render_normalize_round_trip() {
        let doc = normalize("== HEADER ==\nJane Smith\n== SKILLS ==\nPython, SQL, data analysis");
        let again = normalize(&doc.render());
        assert_eq!(doc, again);
    }

    #[test]
    fn masks_email() {
        let doc = ingest("contact jane.doe@example.com", PiiRules::bundled());
        assert_eq!(doc.tokens, vec!["contact", "[PII:email]"]);
        assert_eq!(doc.masked_spans.len(), 1);
        assert_eq!(doc.masked_spans[0].class, PiiClass::Email);
    }

    #[test]
    fn doc_without_pii_unchanged() {
        let base = normalize("built data pipelines in python");
        let masked = mask_pii(&base, PiiRules::bundled());
        assert_eq!(base.tokens, masked.tokens);
        assert!(masked.masked_spans.is_empty());
    }

    #[test]
    fn name_masked_at_every_occurrence() {
        let rules = PiiRules::bundled();
        let name = rules.names().next().unwrap().to_string();
        let raw = format!("{name} wrote code\nreviewed by {name} later");
        let doc = ingest(&raw, rules);
        let count = doc
            .tokens
            .iter()
            .filter(|t| *t == "[PII:name]")
            .count();
        assert_eq!(count, 2);
        assert_eq!(doc.masked_spans.len(), 2);
    }

    #[test]
    fn masking_reaches_fixed_point() {
        let rules = PiiRules::bundled();
        let doc = ingest(
            "jane.doe@example.com called 555-014-2233 via https://example.com/profile",
            rules,
        );
        assert_eq!(rules.scan_count(&doc), 0);
    }

    #[test]
    fn masking_preserves_other_tokens() {
        let rules = PiiRules::bundled();
        let base = normalize("alpha jane.doe@example.com omega");
        let masked = mask_pii(&base, rules);
        let removed: usize = masked.masked_spans.iter().map(|s| s.original_len).sum();
        assert_eq!(
            base.tokens.len() - masked.tokens.len(),
            removed - masked.masked_spans.len()
        );
        assert_eq!(masked.tokens.first().unwrap(), "alpha");
        assert_eq!(masked.tokens.last().unwrap(), "omega");
    }
}
