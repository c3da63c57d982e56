//! NLI pair corpus: labels, sentence pairs, augmented sets, jsonl IO, the
//! shared tokenizer, and token frequency counts.
//!
//! The wire formats are line-oriented json. Loading is strict: schema
//! problems surface as typed errors with 1-based line numbers, and saving a
//! loaded file reproduces it byte for byte.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Three-way NLI verdict with fixed integer codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Entailment,
    Neutral,
    Contradiction,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Entailment, Label::Neutral, Label::Contradiction];

    /// Stable class index used by the classifier head.
    pub fn code(self) -> usize {
        match self {
            Label::Entailment => 0,
            Label::Neutral => 1,
            Label::Contradiction => 2,
        }
    }

    pub fn from_code(code: usize) -> Option<Label> {
        Label::ALL.get(code).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Entailment => "entailment",
            Label::Neutral => "neutral",
            Label::Contradiction => "contradiction",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> Result<Label, ()> {
        match s.to_lowercase().as_str() {
            "entailment" => Ok(Label::Entailment),
            "neutral" => Ok(Label::Neutral),
            "contradiction" => Ok(Label::Contradiction),
            _ => Err(()),
        }
    }
}

/// Which sentence of a pair a revision touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Premise,
    Hypothesis,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Premise => Side::Hypothesis,
            Side::Hypothesis => Side::Premise,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Premise => "premise",
            Side::Hypothesis => "hypothesis",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a generated pair was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Token,
    Sentence,
}

/// One labeled premise/hypothesis pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub premise: String,
    pub hypothesis: String,
    pub label: Label,
}

impl SentencePair {
    pub fn new(premise: impl Into<String>, hypothesis: impl Into<String>, label: Label) -> Self {
        SentencePair {
            premise: premise.into(),
            hypothesis: hypothesis.into(),
            label,
        }
    }

    pub fn side(&self, side: Side) -> &str {
        match side {
            Side::Premise => &self.premise,
            Side::Hypothesis => &self.hypothesis,
        }
    }
}

/// How one generated member of a set came to be.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: Method,
    pub revised_side: Side,
    /// Substituted (from, to) token pair when a single substitution applies.
    pub substituted: Option<(String, String)>,
    /// Classifier confidence at acceptance time, for filtered generation.
    pub confidence: Option<f64>,
}

/// A base pair plus up to three generated counterfactual pairs, one per
/// target class, with provenance for every generated member.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedSet {
    pub group_id: String,
    pub base: SentencePair,
    pub generated: BTreeMap<Label, SentencePair>,
    pub provenance: BTreeMap<Label, Provenance>,
}

impl AugmentedSet {
    pub fn new(group_id: impl Into<String>, base: SentencePair) -> Self {
        AugmentedSet {
            group_id: group_id.into(),
            base,
            generated: BTreeMap::new(),
            provenance: BTreeMap::new(),
        }
    }

    /// Complete sets have a generated pair for all three classes.
    pub fn is_complete(&self) -> bool {
        Label::ALL.iter().all(|l| self.generated.contains_key(l))
    }

    pub fn insert(&mut self, label: Label, pair: SentencePair, provenance: Provenance) {
        self.generated.insert(label, pair);
        self.provenance.insert(label, provenance);
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: not valid json: {reason}")]
    BadJson { line: usize, reason: String },
    #[error("line {line}: missing or invalid field '{field}'")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: unknown label '{value}'")]
    BadLabel { line: usize, value: String },
    #[error("line {line}: empty sentence")]
    EmptySentence { line: usize },
    #[error("line {line}: unknown role '{value}'")]
    BadRole { line: usize, value: String },
    #[error("line {line}: label does not match role")]
    LabelMismatch { line: usize },
    #[error("line {line}: duplicate role in group '{group}'")]
    DuplicateRole { line: usize, group: String },
    #[error("group '{group}' has no base pair")]
    MissingBase { group: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Lowercases, splits on whitespace, and strips punctuation from token
/// edges. Interior punctuation (hyphens, apostrophes) survives; tokens that
/// are all punctuation disappear. Deliberately trivial and deterministic.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.to_lowercase()
                .trim_matches(|c: char| c.is_ascii_punctuation())
                .to_string()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// Token counts over a pair corpus, for frequency-weighted sampling.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
}

impl FrequencyTable {
    /// Counts every token of every premise and hypothesis.
    pub fn build(pairs: &[SentencePair]) -> FrequencyTable {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for pair in pairs {
            for sentence in [&pair.premise, &pair.hypothesis] {
                for token in tokenize(sentence) {
                    *counts.entry(token).or_insert(0) += 1;
                }
            }
        }
        FrequencyTable { counts }
    }

    /// Count for a token; unseen tokens count zero.
    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn distinct_tokens(&self) -> usize {
        self.counts.len()
    }
}

fn field<'v>(
    value: &'v serde_json::Value,
    name: &'static str,
    line: usize,
) -> Result<&'v serde_json::Value, CorpusError> {
    match value.get(name) {
        Some(v) if !v.is_null() => Ok(v),
        _ => Err(CorpusError::MissingField { line, field: name }),
    }
}

fn string_field(
    value: &serde_json::Value,
    name: &'static str,
    line: usize,
) -> Result<String, CorpusError> {
    field(value, name, line)?
        .as_str()
        .map(str::to_string)
        .ok_or(CorpusError::MissingField { line, field: name })
}

fn label_field(value: &serde_json::Value, line: usize) -> Result<Label, CorpusError> {
    let raw = string_field(value, "label", line)?;
    raw.parse().map_err(|_| CorpusError::BadLabel {
        line,
        value: raw.clone(),
    })
}

fn check_sentences(premise: &str, hypothesis: &str, line: usize) -> Result<(), CorpusError> {
    if premise.trim().is_empty() || hypothesis.trim().is_empty() {
        Err(CorpusError::EmptySentence { line })
    } else {
        Ok(())
    }
}

fn parse_json_line(raw: &str, line: usize) -> Result<serde_json::Value, CorpusError> {
    serde_json::from_str(raw).map_err(|e| CorpusError::BadJson {
        line,
        reason: e.to_string(),
    })
}

/// Loads a pair-per-line jsonl stream, validating schema and sentences.
pub fn load_pairs(reader: impl BufRead) -> Result<Vec<SentencePair>, CorpusError> {
    let mut pairs = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line_no = no + 1;
        let raw = line?;
        if raw.trim().is_empty() {
            continue;
        }
        let value = parse_json_line(&raw, line_no)?;
        let premise = string_field(&value, "premise", line_no)?;
        let hypothesis = string_field(&value, "hypothesis", line_no)?;
        let label = label_field(&value, line_no)?;
        check_sentences(&premise, &hypothesis, line_no)?;
        pairs.push(SentencePair {
            premise,
            hypothesis,
            label,
        });
    }
    Ok(pairs)
}

/// Writes pairs as one json object per line.
pub fn save_pairs(mut writer: impl Write, pairs: &[SentencePair]) -> std::io::Result<()> {
    for pair in pairs {
        serde_json::to_writer(&mut writer, pair)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// On-disk shape of one set member. Base lines carry null provenance fields.
#[derive(Serialize, Deserialize)]
struct SetLine {
    group_id: String,
    role: String,
    premise: String,
    hypothesis: String,
    label: Label,
    method: Option<Method>,
    revised_side: Option<Side>,
    substituted: Option<(String, String)>,
    confidence: Option<f64>,
}

/// Writes augmented sets as one line per member: the base pair first, then
/// generated pairs in class order.
pub fn save_sets(mut writer: impl Write, sets: &[AugmentedSet]) -> std::io::Result<()> {
    for set in sets {
        let base = &set.base;
        let line = SetLine {
            group_id: set.group_id.clone(),
            role: "base".to_string(),
            premise: base.premise.clone(),
            hypothesis: base.hypothesis.clone(),
            label: base.label,
            method: None,
            revised_side: None,
            substituted: None,
            confidence: None,
        };
        serde_json::to_writer(&mut writer, &line)?;
        writer.write_all(b"\n")?;
        for (label, pair) in &set.generated {
            let prov = set
                .provenance
                .get(label)
                .expect("provenance present for every generated label");
            let line = SetLine {
                group_id: set.group_id.clone(),
                role: label.as_str().to_string(),
                premise: pair.premise.clone(),
                hypothesis: pair.hypothesis.clone(),
                label: *label,
                method: Some(prov.method),
                revised_side: Some(prov.revised_side),
                substituted: prov.substituted.clone(),
                confidence: prov.confidence,
            };
            serde_json::to_writer(&mut writer, &line)?;
            writer.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Loads augmented sets, grouping lines by `group_id` in order of first
/// appearance. Every group must contain exactly one base line; generated
/// lines must carry provenance and a label matching their role.
pub fn load_sets(reader: impl BufRead) -> Result<Vec<AugmentedSet>, CorpusError> {
    struct Pending {
        group_id: String,
        base: Option<SentencePair>,
        generated: BTreeMap<Label, SentencePair>,
        provenance: BTreeMap<Label, Provenance>,
    }

    let mut pending: Vec<Pending> = Vec::new();
    let mut by_group: HashMap<String, usize> = HashMap::new();

    for (no, line) in reader.lines().enumerate() {
        let line_no = no + 1;
        let raw = line?;
        if raw.trim().is_empty() {
            continue;
        }
        let value = parse_json_line(&raw, line_no)?;
        let group_id = string_field(&value, "group_id", line_no)?;
        let role = string_field(&value, "role", line_no)?;
        let premise = string_field(&value, "premise", line_no)?;
        let hypothesis = string_field(&value, "hypothesis", line_no)?;
        let label = label_field(&value, line_no)?;
        check_sentences(&premise, &hypothesis, line_no)?;
        let pair = SentencePair {
            premise,
            hypothesis,
            label,
        };

        let slot = *by_group.entry(group_id.clone()).or_insert_with(|| {
            pending.push(Pending {
                group_id: group_id.clone(),
                base: None,
                generated: BTreeMap::new(),
                provenance: BTreeMap::new(),
            });
            pending.len() - 1
        });

        if role == "base" {
            if pending[slot].base.is_some() {
                return Err(CorpusError::DuplicateRole {
                    line: line_no,
                    group: group_id,
                });
            }
            pending[slot].base = Some(pair);
            continue;
        }

        let role_label: Label = role.parse().map_err(|_| CorpusError::BadRole {
            line: line_no,
            value: role.clone(),
        })?;
        if role_label != label {
            return Err(CorpusError::LabelMismatch { line: line_no });
        }
        if pending[slot].generated.contains_key(&role_label) {
            return Err(CorpusError::DuplicateRole {
                line: line_no,
                group: group_id,
            });
        }

        let method_raw = string_field(&value, "method", line_no)?;
        let method = match method_raw.as_str() {
            "token" => Method::Token,
            "sentence" => Method::Sentence,
            _ => {
                return Err(CorpusError::MissingField {
                    line: line_no,
                    field: "method",
                })
            }
        };
        let side_raw = string_field(&value, "revised_side", line_no)?;
        let revised_side = match side_raw.as_str() {
            "premise" => Side::Premise,
            "hypothesis" => Side::Hypothesis,
            _ => {
                return Err(CorpusError::MissingField {
                    line: line_no,
                    field: "revised_side",
                })
            }
        };
        let substituted = match value.get("substituted") {
            None | Some(serde_json::Value::Null) => None,
            Some(v) => {
                let pair: (String, String) =
                    serde_json::from_value(v.clone()).map_err(|_| CorpusError::MissingField {
                        line: line_no,
                        field: "substituted",
                    })?;
                Some(pair)
            }
        };
        let confidence = match value.get("confidence") {
            None | Some(serde_json::Value::Null) => None,
            Some(v) => Some(v.as_f64().ok_or(CorpusError::MissingField {
                line: line_no,
                field: "confidence",
            })?),
        };

        pending[slot].generated.insert(role_label, pair);
        pending[slot].provenance.insert(
            role_label,
            Provenance {
                method,
                revised_side,
                substituted,
                confidence,
            },
        );
    }

    pending
        .into_iter()
        .map(|p| match p.base {
            Some(base) => Ok(AugmentedSet {
                group_id: p.group_id,
                base,
                generated: p.generated,
                provenance: p.provenance,
            }),
            None => Err(CorpusError::MissingBase { group: p.group_id }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn tokenize_strips_edge_punctuation_only() {
        assert_eq!(
            tokenize("A man in a boom-lift bucket welds."),
            vec!["a", "man", "in", "a", "boom-lift", "bucket", "welds"]
        );
        assert_eq!(
            tokenize("Don't stop -- ever!"),
            vec!["don't", "stop", "ever"]
        );
        assert_eq!(tokenize("   "), Vec::<String>::new());
    }

    #[test]
    fn label_codes_are_stable() {
        assert_eq!(Label::Entailment.code(), 0);
        assert_eq!(Label::Neutral.code(), 1);
        assert_eq!(Label::Contradiction.code(), 2);
        for label in Label::ALL {
            assert_eq!(Label::from_code(label.code()), Some(label));
            assert_eq!(label.as_str().parse::<Label>(), Ok(label));
        }
        assert_eq!("ENTAILMENT".parse::<Label>(), Ok(Label::Entailment));
        assert!("maybe".parse::<Label>().is_err());
    }

    #[test]
    fn load_pairs_reports_line_numbers() {
        let good = r#"{"premise":"a dog runs","hypothesis":"an animal runs","label":"entailment"}"#;
        let missing = r#"{"premise":"a dog runs","label":"entailment"}"#;
        let input = format!("{good}\n{missing}\n");
        let err = load_pairs(Cursor::new(input)).unwrap_err();
        match err {
            CorpusError::MissingField { line, field } => {
                assert_eq!(line, 2);
                assert_eq!(field, "hypothesis");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_pairs_rejects_bad_labels_and_empty_sentences() {
        let bad_label = r#"{"premise":"a","hypothesis":"b","label":"maybe"}"#;
        assert!(matches!(
            load_pairs(Cursor::new(bad_label)).unwrap_err(),
            CorpusError::BadLabel { line: 1, .. }
        ));
        let empty = r#"{"premise":"   ","hypothesis":"b","label":"neutral"}"#;
        assert!(matches!(
            load_pairs(Cursor::new(empty)).unwrap_err(),
            CorpusError::EmptySentence { line: 1 }
        ));
    }

    #[test]
    fn pairs_round_trip() {
        let pairs = vec![
            SentencePair::new("a dog runs", "an animal runs", Label::Entailment),
            SentencePair::new("a cat sits", "a kitten sits", Label::Neutral),
        ];
        let mut buf = Vec::new();
        save_pairs(&mut buf, &pairs).unwrap();
        let loaded = load_pairs(Cursor::new(&buf)).unwrap();
        assert_eq!(loaded, pairs);
        let mut again = Vec::new();
        save_pairs(&mut again, &loaded).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn frequency_counts_both_sides() {
        let pairs = vec![SentencePair::new(
            "the dog runs",
            "the dog rests",
            Label::Neutral,
        )];
        let freq = FrequencyTable::build(&pairs);
        assert_eq!(freq.count("dog"), 2);
        assert_eq!(freq.count("the"), 2);
        assert_eq!(freq.count("runs"), 1);
        assert_eq!(freq.count("unseen"), 0);
    }

    fn sample_set() -> AugmentedSet {
        let mut set = AugmentedSet::new(
            "tok-000001",
            SentencePair::new("the dog runs", "the dog runs", Label::Entailment),
        );
        set.insert(
            Label::Neutral,
            SentencePair::new("the dog runs", "the puppy runs", Label::Neutral),
            Provenance {
                method: Method::Token,
                revised_side: Side::Hypothesis,
                substituted: Some(("dog".into(), "puppy".into())),
                confidence: None,
            },
        );
        set.insert(
            Label::Contradiction,
            SentencePair::new("the dog runs", "the cat runs", Label::Contradiction),
            Provenance {
                method: Method::Sentence,
                revised_side: Side::Hypothesis,
                substituted: None,
                confidence: Some(0.9375),
            },
        );
        set
    }

    #[test]
    fn sets_round_trip_byte_identically() {
        let sets = vec![sample_set()];
        let mut buf = Vec::new();
        save_sets(&mut buf, &sets).unwrap();
        let loaded = load_sets(Cursor::new(&buf)).unwrap();
        assert_eq!(loaded, sets);
        let mut again = Vec::new();
        save_sets(&mut again, &loaded).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn set_label_must_match_role() {
        let line = r#"{"group_id":"g","role":"neutral","premise":"a","hypothesis":"b","label":"entailment","method":"token","revised_side":"premise","substituted":null,"confidence":null}"#;
        let base = r#"{"group_id":"g","role":"base","premise":"a","hypothesis":"a","label":"entailment","method":null,"revised_side":null,"substituted":null,"confidence":null}"#;
        let input = format!("{base}\n{line}\n");
        assert!(matches!(
            load_sets(Cursor::new(input)).unwrap_err(),
            CorpusError::LabelMismatch { line: 2 }
        ));
    }

    #[test]
    fn set_without_base_is_rejected() {
        let line = r#"{"group_id":"g","role":"neutral","premise":"a","hypothesis":"b","label":"neutral","method":"token","revised_side":"premise","substituted":null,"confidence":null}"#;
        assert!(matches!(
            load_sets(Cursor::new(line)).unwrap_err(),
            CorpusError::MissingBase { .. }
        ));
    }

    #[test]
    fn incomplete_set_is_not_complete() {
        let mut set = sample_set();
        assert!(!set.is_complete());
        set.insert(
            Label::Entailment,
            SentencePair::new("the dog runs", "the doggy runs", Label::Entailment),
            Provenance {
                method: Method::Token,
                revised_side: Side::Hypothesis,
                substituted: Some(("dog".into(), "doggy".into())),
                confidence: None,
            },
        );
        assert!(set.is_complete());
    }
}
