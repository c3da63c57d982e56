//! Counterfactual augmentation: shared substitution machinery plus the
//! token-level and sentence-level strategies.

pub mod sentence;
pub mod token;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Label, SentencePair, Side};
use crate::wordnet::RelationKind;

/// Side selection policy for a whole augmentation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SidePolicy {
    Premise,
    Hypothesis,
    /// Even group indices revise the premise, odd ones the hypothesis.
    Alternate,
}

impl SidePolicy {
    pub fn resolve(self, group_index: usize) -> Side {
        match self {
            SidePolicy::Premise => Side::Premise,
            SidePolicy::Hypothesis => Side::Hypothesis,
            SidePolicy::Alternate => {
                if group_index.is_multiple_of(2) {
                    Side::Premise
                } else {
                    Side::Hypothesis
                }
            }
        }
    }
}

/// Relations that may replace a noun to steer the pair toward `target` when
/// revising `side`. Order matters: candidate pools concatenate in this order.
pub fn relation_kinds(target: Label, side: Side) -> &'static [RelationKind] {
    use RelationKind::*;
    match (target, side) {
        (Label::Entailment, Side::Premise) => &[Synonym, Hyponym],
        (Label::Entailment, Side::Hypothesis) => &[Synonym, Hypernym],
        (Label::Neutral, Side::Premise) => &[Hypernym],
        (Label::Neutral, Side::Hypothesis) => &[Hyponym],
        (Label::Contradiction, _) => &[Antonym, CoHyponym],
    }
}

/// Copies the to-be-revised sentence into both slots of a fresh pair, labeled
/// Entailment: a sentence trivially entails itself.
pub fn make_base(pair: &SentencePair, side: Side) -> SentencePair {
    let s = pair.side(side);
    SentencePair::new(s, s, Label::Entailment)
}

/// Replaces every occurrence of `token` in `sentence`, preserving edge
/// punctuation and leading capitalization of each replaced occurrence.
/// Occurrences are whitespace chunks whose punctuation-trimmed core matches
/// `token` case-insensitively. Inter-word whitespace normalizes to single
/// spaces, matching what the tokenizer sees.
pub fn substitute(sentence: &str, token: &str, replacement: &str) -> String {
    let chunks: Vec<String> = sentence
        .split_whitespace()
        .map(|chunk| {
            let rest = chunk.trim_start_matches(|c: char| c.is_ascii_punctuation());
            let start = chunk.len() - rest.len();
            let core = rest.trim_end_matches(|c: char| c.is_ascii_punctuation());
            let end = start + core.len();
            if core.to_lowercase() != token {
                return chunk.to_string();
            }
            let leading_upper = core.chars().next().is_some_and(char::is_uppercase);
            let replaced = if leading_upper {
                capitalize(replacement)
            } else {
                replacement.to_string()
            };
            format!("{}{replaced}{}", &chunk[..start], &chunk[end..])
        })
        .collect();
    chunks.join(" ")
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Samples an index proportional to `weights`. Returns None when the total
/// weight is zero (nothing can be drawn).
pub fn weighted_choice(rng: &mut ChaCha8Rng, weights: &[u64]) -> Option<usize> {
    let total: u64 = weights.iter().sum();
    if total == 0 {
        return None;
    }
    let mut x = rng.random_range(0..total);
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return Some(i);
        }
        x -= w;
    }
    unreachable!("cumulative walk covers the total weight")
}

/// Words never selected for substitution: articles, pronouns, auxiliaries,
/// and similar function words that other lexica may list as nouns.
pub const STOPWORDS: &[&str] = &[
    "a", "am", "an", "and", "are", "be", "been", "being", "but", "can", "could", "did", "do",
    "does", "had", "has", "have", "he", "her", "hers", "him", "his", "i", "is", "it", "its", "may",
    "me", "might", "mine", "must", "my", "no", "not", "of", "one", "or", "our", "ours", "shall",
    "she", "should", "that", "the", "their", "theirs", "them", "these", "they", "this", "those",
    "us", "was", "we", "were", "what", "which", "who", "whom", "will", "would", "you", "your",
    "yours",
];

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}
