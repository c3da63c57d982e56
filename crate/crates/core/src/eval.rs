//! Accuracy measurement over labeled test splits and a plain-text table
//! comparing training modes across splits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::SentencePair;
use crate::encoder::{predict, EncoderError, EncoderParams, Vocab};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("split '{0}' has no pairs")]
    EmptySplit(String),
    #[error(transparent)]
    Encoder(#[from] EncoderError),
}

/// Accuracy of one model on one split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub split: String,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// One model's metrics across all evaluated splits; the on-disk shape of a
/// metrics file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub mode: String,
    pub splits: Vec<Metrics>,
}

/// Scores every pair with the argmax of the classifier logits (ties go to
/// the lowest class index) and reports the fraction correct.
pub fn evaluate(
    params: &EncoderParams,
    vocab: &Vocab,
    pairs: &[SentencePair],
    split_name: &str,
) -> Result<Metrics, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptySplit(split_name.to_string()));
    }
    let mut correct = 0;
    for pair in pairs {
        if predict(params, vocab, pair)? == pair.label {
            correct += 1;
        }
    }
    Ok(Metrics {
        split: split_name.to_string(),
        n: pairs.len(),
        correct,
        accuracy: correct as f64 / pairs.len() as f64,
    })
}

/// Renders mode-by-split accuracies as an aligned text table. Rows keep the
/// input order; columns appear in order of first appearance. Splits a mode
/// never evaluated render as "-".
pub fn compare(reports: &[ModeReport]) -> String {
    let mut split_names: Vec<&str> = Vec::new();
    for report in reports {
        for m in &report.splits {
            if !split_names.contains(&m.split.as_str()) {
                split_names.push(&m.split);
            }
        }
    }
    let widths: Vec<usize> = split_names.iter().map(|s| s.len().max(6)).collect();
    let mode_width = reports
        .iter()
        .map(|r| r.mode.len())
        .chain(std::iter::once("mode".len()))
        .max()
        .unwrap_or(4);

    let mut out = String::new();
    out.push_str(&format!("{:<mode_width$}", "mode"));
    for (name, w) in split_names.iter().zip(&widths) {
        out.push_str(&format!("  {name:>width$}", width = *w));
    }
    out.push('\n');
    for report in reports {
        out.push_str(&format!("{:<mode_width$}", report.mode));
        for (name, w) in split_names.iter().zip(&widths) {
            let cell = report
                .splits
                .iter()
                .find(|m| m.split == *name)
                .map(|m| format!("{:.4}", m.accuracy))
                .unwrap_or_else(|| "-".to_string());
            out.push_str(&format!("  {cell:>width$}", width = *w));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;
    use crate::encoder::EncoderDims;

    fn dims() -> EncoderDims {
        EncoderDims {
            embed: 4,
            hidden: 3,
            proj: 2,
        }
    }

    #[test]
    fn zero_model_predicts_the_tie_break_class() {
        let pairs = vec![
            SentencePair::new("a", "b", Label::Entailment),
            SentencePair::new("c", "d", Label::Neutral),
            SentencePair::new("e", "f", Label::Contradiction),
        ];
        let vocab = Vocab::build(&pairs);
        let params = EncoderParams::init(vocab.len(), dims(), 0).zeros_like();
        let m = evaluate(&params, &vocab, &pairs, "tie").unwrap();
        // all logits zero: every prediction is the lowest class index
        assert_eq!(m.correct, 1);
        assert!((m.accuracy - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.n, 3);
    }

    #[test]
    fn accuracy_ignores_input_order() {
        let mut pairs = vec![
            SentencePair::new("a", "b", Label::Entailment),
            SentencePair::new("c", "d", Label::Neutral),
            SentencePair::new("e", "f", Label::Entailment),
            SentencePair::new("g", "h", Label::Contradiction),
        ];
        let vocab = Vocab::build(&pairs);
        let params = EncoderParams::init(vocab.len(), dims(), 4);
        let forward = evaluate(&params, &vocab, &pairs, "s").unwrap();
        pairs.reverse();
        let backward = evaluate(&params, &vocab, &pairs, "s").unwrap();
        assert_eq!(forward.correct, backward.correct);
        assert_eq!(forward.accuracy, backward.accuracy);
    }

    #[test]
    fn empty_split_is_an_error() {
        let vocab = Vocab::build(&[]);
        let params = EncoderParams::init(vocab.len(), dims(), 0);
        assert!(matches!(
            evaluate(&params, &vocab, &[], "void"),
            Err(EvalError::EmptySplit(name)) if name == "void"
        ));
    }

    #[test]
    fn accuracy_matches_bruteforce_recount() {
        let pairs: Vec<SentencePair> = (0..30)
            .map(|i| {
                SentencePair::new(
                    format!("tok{} alpha beta", i % 7),
                    format!("tok{} gamma", (i + 3) % 7),
                    Label::from_code(i % 3).unwrap(),
                )
            })
            .collect();
        let vocab = Vocab::build(&pairs);
        let params = EncoderParams::init(vocab.len(), dims(), 77);
        let m = evaluate(&params, &vocab, &pairs, "fixture").unwrap();
        let recount = pairs
            .iter()
            .filter(|p| predict(&params, &vocab, p).unwrap() == p.label)
            .count();
        assert_eq!(m.correct, recount);
        assert!((m.accuracy - recount as f64 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn table_lays_out_modes_by_splits() {
        let reports = vec![
            ModeReport {
                mode: "baseline".to_string(),
                splits: vec![
                    Metrics {
                        split: "original".to_string(),
                        n: 10,
                        correct: 9,
                        accuracy: 0.9,
                    },
                    Metrics {
                        split: "rp".to_string(),
                        n: 10,
                        correct: 6,
                        accuracy: 0.6,
                    },
                ],
            },
            ModeReport {
                mode: "rda-rcl".to_string(),
                splits: vec![Metrics {
                    split: "rp".to_string(),
                    n: 10,
                    correct: 9,
                    accuracy: 0.9,
                }],
            },
        ];
        let table = compare(&reports);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("original"));
        assert!(lines[0].contains("rp"));
        assert!(lines[1].starts_with("baseline"));
        assert!(lines[1].contains("0.9000"));
        assert!(lines[2].starts_with("rda-rcl"));
        // the mode with no "original" metrics renders a dash
        assert!(lines[2].contains('-'));
        // row order preserved
        assert!(table.find("baseline").unwrap() < table.find("rda-rcl").unwrap());
    }

    #[test]
    fn empty_report_list_gives_header_only() {
        let table = compare(&[]);
        assert_eq!(table, "mode\n");
    }
}
