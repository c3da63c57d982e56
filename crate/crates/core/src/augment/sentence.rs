//! Iterative generate-and-filter augmentation. Each round trains a
//! classifier on the originals plus everything accepted so far, asks a
//! generator for the still-missing labels of every set, and keeps only
//! generations the classifier scores at or above the confidence threshold.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augment::{is_stopword, relation_kinds, substitute, weighted_choice, SidePolicy};
use crate::corpus::{
    tokenize, AugmentedSet, FrequencyTable, Label, Method, Provenance, SentencePair, Side,
};
use crate::encoder::{confidence, EncoderDims, EncoderParams, Vocab};
use crate::train::{train, ContrastiveConfig, ContrastiveMode, TrainError};
use crate::wordnet::{Lexicon, RelationKind};

#[derive(Debug, Error)]
pub enum SentenceAugmentError {
    #[error("invalid loop config: {0}")]
    BadConfig(String),
    #[error("no pairs to augment")]
    EmptyCorpus,
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// Loop controls: acceptance threshold, target coverage, iteration cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SentenceAugmentConfig {
    pub tau: f64,
    pub coverage_goal: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SentenceAugmentConfig {
    fn default() -> Self {
        SentenceAugmentConfig {
            tau: 0.9,
            coverage_goal: 0.95,
            max_iterations: 10,
            seed: 0,
        }
    }
}

impl SentenceAugmentConfig {
    pub fn validate(&self) -> Result<(), SentenceAugmentError> {
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(SentenceAugmentError::BadConfig(
                "tau must lie in [0, 1]".to_string(),
            ));
        }
        if !(self.coverage_goal > 0.0 && self.coverage_goal <= 1.0) {
            return Err(SentenceAugmentError::BadConfig(
                "coverage goal must lie in (0, 1]".to_string(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(SentenceAugmentError::BadConfig(
                "max iterations must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Produces candidate pairs for a target label by revising one side of an
/// original pair. `train` is a hook for learned generators; stateless ones
/// ignore it.
pub trait Generator {
    fn train(&mut self, _train_set: &[SentencePair]) {}
    fn generate(&mut self, pair: &SentencePair, target: Label, side: Side) -> Option<SentencePair>;
}

/// The filtering classifier: refit every iteration, then queried for the
/// softmax probability of a target label.
pub trait LoopClassifier {
    fn fit(&mut self, train_set: &[SentencePair]) -> Result<(), TrainError>;
    fn confidence(&self, pair: &SentencePair, target: Label) -> f64;
}

/// Per-iteration progress counters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub coverage: f64,
    pub accepted: usize,
    pub generator_failures: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    CoverageGoal,
    MaxIterations,
}

/// Full history of one augmentation run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopReport {
    pub iterations: Vec<IterationStats>,
    pub final_coverage: f64,
    pub stop_reason: StopReason,
}

/// Runs the loop. Sides alternate by pair index (even revises the premise,
/// odd the hypothesis). Accepted pairs persist, so coverage never drops.
pub fn run_sentence_augmentation(
    pairs: &[SentencePair],
    generator: &mut dyn Generator,
    classifier: &mut dyn LoopClassifier,
    cfg: &SentenceAugmentConfig,
) -> Result<(Vec<AugmentedSet>, LoopReport), SentenceAugmentError> {
    cfg.validate()?;
    if pairs.is_empty() {
        return Err(SentenceAugmentError::EmptyCorpus);
    }
    let mut sets: Vec<AugmentedSet> = pairs
        .iter()
        .enumerate()
        .map(|(i, p)| AugmentedSet::new(format!("sent-{i:06}"), p.clone()))
        .collect();
    let mut report = LoopReport {
        iterations: Vec::new(),
        final_coverage: 0.0,
        stop_reason: StopReason::MaxIterations,
    };
    for iteration in 1..=cfg.max_iterations {
        let train_set: Vec<SentencePair> = pairs
            .iter()
            .cloned()
            .chain(sets.iter().flat_map(|s| s.generated.values().cloned()))
            .collect();
        classifier.fit(&train_set)?;
        generator.train(&train_set);

        let mut accepted = 0usize;
        let mut generator_failures = 0usize;
        for (i, set) in sets.iter_mut().enumerate() {
            let side = SidePolicy::Alternate.resolve(i);
            for target in Label::ALL {
                if set.generated.contains_key(&target) {
                    continue;
                }
                let Some(gen_pair) = generator.generate(&set.base, target, side) else {
                    generator_failures += 1;
                    continue;
                };
                // enforce the generator contract rather than trusting it
                if gen_pair.label != target
                    || gen_pair.side(side.other()) != set.base.side(side.other())
                {
                    generator_failures += 1;
                    continue;
                }
                let conf = classifier.confidence(&gen_pair, target);
                if conf >= cfg.tau {
                    accepted += 1;
                    set.insert(
                        target,
                        gen_pair,
                        Provenance {
                            method: Method::Sentence,
                            revised_side: side,
                            substituted: None,
                            confidence: Some(conf),
                        },
                    );
                }
            }
        }
        let coverage = sets.iter().filter(|s| s.is_complete()).count() as f64 / sets.len() as f64;
        report.iterations.push(IterationStats {
            iteration,
            coverage,
            accepted,
            generator_failures,
        });
        report.final_coverage = coverage;
        if coverage >= cfg.coverage_goal {
            report.stop_reason = StopReason::CoverageGoal;
            break;
        }
    }
    Ok((sets, report))
}

/// One planned substitution step: the relation kinds whose candidate pools
/// are merged before sampling.
type StepKinds = Vec<RelationKind>;

/// Plans 1-2 substitution steps that move a pair labeled `label` toward
/// `target` by revising `side`. Same label: a synonym swap. From a neutral
/// or contradiction start the first step walks back toward agreement before
/// the usual relation for the target is applied.
fn plan_steps(label: Label, target: Label, side: Side) -> Vec<StepKinds> {
    use Label::*;
    if label == target {
        return vec![vec![RelationKind::Synonym]];
    }
    let toward = |t: Label| relation_kinds(t, side).to_vec();
    match (label, target) {
        (Entailment, t) => vec![toward(t)],
        (Neutral, Entailment) => vec![toward(Entailment)],
        (Neutral, Contradiction) => {
            let agree: StepKinds = relation_kinds(Entailment, side)
                .iter()
                .copied()
                .filter(|k| *k != RelationKind::Synonym)
                .collect();
            vec![agree, toward(Contradiction)]
        }
        (Contradiction, Entailment) => vec![toward(Contradiction)],
        (Contradiction, Neutral) => vec![toward(Contradiction), toward(Neutral)],
        _ => unreachable!("label == target handled above"),
    }
}

/// Relation-table generator: picks a noun on the revised side and applies
/// the planned substitution chain, sampling candidates by corpus frequency.
/// Stateless across iterations apart from its RNG stream, so retried slots
/// get fresh draws.
pub struct LexicalGenerator<'a> {
    lexicon: &'a Lexicon,
    freq: &'a FrequencyTable,
    smoothing: u64,
    rng: ChaCha8Rng,
    trace: Vec<(String, String, RelationKind)>,
}

impl<'a> LexicalGenerator<'a> {
    pub fn new(lexicon: &'a Lexicon, freq: &'a FrequencyTable, seed: u64) -> Self {
        LexicalGenerator {
            lexicon,
            freq,
            smoothing: 1,
            rng: ChaCha8Rng::seed_from_u64(seed),
            trace: Vec::new(),
        }
    }

    /// Substitution steps of the most recent successful generate call, as
    /// (replaced word, replacement, relation used).
    pub fn last_trace(&self) -> &[(String, String, RelationKind)] {
        &self.trace
    }

    fn try_chain(&mut self, sentence: &str, noun: &str, steps: &[StepKinds]) -> Option<String> {
        let mut current_sentence = sentence.to_string();
        let mut current_word = noun.to_string();
        let mut staged = Vec::new();
        for kinds in steps {
            let mut pool: Vec<(String, RelationKind)> = Vec::new();
            for kind in kinds {
                for cand in self.lexicon.candidates(&current_word, *kind) {
                    if pool.iter().all(|(c, _)| *c != cand) {
                        pool.push((cand, *kind));
                    }
                }
            }
            let weights: Vec<u64> = pool
                .iter()
                .map(|(c, _)| self.freq.count(c) + self.smoothing)
                .collect();
            let idx = weighted_choice(&mut self.rng, &weights)?;
            let (replacement, kind) = pool[idx].clone();
            staged.push((current_word.clone(), replacement.clone(), kind));
            current_sentence = substitute(&current_sentence, &current_word, &replacement);
            current_word = replacement;
        }
        self.trace = staged;
        Some(current_sentence)
    }
}

impl Generator for LexicalGenerator<'_> {
    fn generate(&mut self, pair: &SentencePair, target: Label, side: Side) -> Option<SentencePair> {
        let sentence = pair.side(side);
        let mut nouns: Vec<String> = Vec::new();
        for token in tokenize(sentence) {
            if self.lexicon.is_noun(&token) && !is_stopword(&token) && !nouns.contains(&token) {
                nouns.push(token);
            }
        }
        if nouns.is_empty() {
            return None;
        }
        nouns.shuffle(&mut self.rng);
        let steps = plan_steps(pair.label, target, side);
        for noun in &nouns {
            if let Some(revised) = self.try_chain(sentence, noun, &steps) {
                let (premise, hypothesis) = match side {
                    Side::Premise => (revised, pair.hypothesis.clone()),
                    Side::Hypothesis => (pair.premise.clone(), revised),
                };
                return Some(SentencePair {
                    premise,
                    hypothesis,
                    label: target,
                });
            }
        }
        None
    }
}

/// Encoder-backed filter: refits a fresh model with cross-entropy every
/// iteration and scores candidates with its softmax.
pub struct EncoderLoopClassifier {
    pub dims: EncoderDims,
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    /// Multiplier applied to the freshly drawn weights. The stock draw is
    /// too faint for a short refit to move, so the filter starts hot.
    pub init_scale: f64,
    pub seed: u64,
    model: Option<(Vocab, EncoderParams)>,
}

impl EncoderLoopClassifier {
    pub fn new(seed: u64) -> Self {
        EncoderLoopClassifier {
            dims: EncoderDims::default(),
            epochs: 100,
            lr: 0.2,
            batch_size: 16,
            init_scale: 5.0,
            seed,
            model: None,
        }
    }
}

impl LoopClassifier for EncoderLoopClassifier {
    fn fit(&mut self, train_set: &[SentencePair]) -> Result<(), TrainError> {
        let vocab = Vocab::build(train_set);
        let mut params = EncoderParams::init(vocab.len(), self.dims, self.seed);
        for m in [
            &mut params.emb,
            &mut params.w1,
            &mut params.w2,
            &mut params.wc,
        ] {
            for v in &mut m.data {
                *v *= self.init_scale;
            }
        }
        let cfg = ContrastiveConfig {
            mode: ContrastiveMode::None,
            cl_epochs: 0,
            ce_epochs: self.epochs,
            ce_lr: self.lr,
            batch_size: self.batch_size,
            seed: self.seed,
            ..ContrastiveConfig::default()
        };
        train(&mut params, &vocab, train_set, &[], &cfg)?;
        self.model = Some((vocab, params));
        Ok(())
    }

    fn confidence(&self, pair: &SentencePair, target: Label) -> f64 {
        match &self.model {
            // never fit: uniform over the three classes
            None => 1.0 / 3.0,
            Some((vocab, params)) => {
                let c = confidence(params, vocab, pair, target).unwrap_or(0.0);
                // a diverged refit must reject, not emit NaN comparisons
                if c.is_finite() {
                    c
                } else {
                    0.0
                }
            }
        }
    }
}
