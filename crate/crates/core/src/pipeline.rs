//! End-to-end orchestration: load a corpus, optionally augment it, train an
//! encoder, and score it on evaluation splits, writing every artifact into
//! one output directory.
//!
//! A run is described by a [`PipelineConfig`], loadable from a json file.
//! All randomness derives from one global seed, fanned out per stage with
//! [`stage_seed`], so two runs with the same config produce byte-identical
//! artifacts (wall-clock timing aside).

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augment::sentence::{
    run_sentence_augmentation, EncoderLoopClassifier, LexicalGenerator, LoopReport,
    SentenceAugmentConfig, SentenceAugmentError,
};
use crate::augment::token::{augment_corpus, TokenAugmentConfig};
use crate::corpus::{
    load_pairs, save_sets, AugmentedSet, CorpusError, FrequencyTable, SentencePair,
};
use crate::encoder::{save_checkpoint, EncoderDims, EncoderError, EncoderParams, Vocab};
use crate::eval::{evaluate, EvalError, Metrics, ModeReport};
use crate::train::{train, ContrastiveConfig, ContrastiveMode, TrainError, TrainReport};
use crate::wordnet::{Lexicon, LexiconError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid pipeline config: {0}")]
    BadConfig(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Encoder(#[from] EncoderError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Augment(#[from] SentenceAugmentError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl PipelineError {
    /// True for errors a caller caused with bad arguments or config, as
    /// opposed to failures while running.
    pub fn is_validation(&self) -> bool {
        match self {
            PipelineError::BadConfig(_) => true,
            PipelineError::Train(e) => matches!(
                e,
                TrainError::BadConfig(_) | TrainError::NonPositiveTemperature
            ),
            PipelineError::Augment(SentenceAugmentError::BadConfig(_)) => true,
            _ => false,
        }
    }
}

/// Which augmentation pass produces training sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentMethod {
    Token,
    Sentence,
    Both,
}

impl AugmentMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            AugmentMethod::Token => "token",
            AugmentMethod::Sentence => "sentence",
            AugmentMethod::Both => "both",
        }
    }

    fn runs_token(&self) -> bool {
        matches!(self, AugmentMethod::Token | AugmentMethod::Both)
    }

    fn runs_sentence(&self) -> bool {
        matches!(self, AugmentMethod::Sentence | AugmentMethod::Both)
    }
}

impl FromStr for AugmentMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "token" => Ok(AugmentMethod::Token),
            "sentence" => Ok(AugmentMethod::Sentence),
            "both" => Ok(AugmentMethod::Both),
            other => Err(format!(
                "unknown augmentation method {other:?}, expected token, sentence, or both"
            )),
        }
    }
}

/// One named evaluation split, parsed from `name=path`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub name: String,
    pub path: PathBuf,
}

impl FromStr for SplitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, path) = s
            .split_once('=')
            .ok_or_else(|| format!("expected name=path, got {s:?}"))?;
        if name.is_empty() || path.is_empty() {
            return Err(format!("expected name=path, got {s:?}"));
        }
        Ok(SplitSpec {
            name: name.to_string(),
            path: PathBuf::from(path),
        })
    }
}

/// Everything one pipeline run needs. Unset fields take defaults, so a
/// config file only has to mention what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Lexicon directory; required whenever augmentation runs.
    pub wordnet_dir: PathBuf,
    /// Training corpus (jsonl pairs).
    pub train: PathBuf,
    /// Evaluation splits, scored in order.
    pub splits: Vec<SplitSpec>,
    /// Directory all artifacts are written into.
    pub out_dir: PathBuf,
    /// Augmentation pass to run; `None` trains on originals alone.
    pub method: Option<AugmentMethod>,
    /// Feed accepted generated pairs (and sets) to training. Disabling it
    /// still writes the augmentation artifacts but trains on originals only.
    pub use_generated: bool,
    pub token: TokenAugmentConfig,
    pub sentence: SentenceAugmentConfig,
    pub trainer: ContrastiveConfig,
    /// Global seed; every stage derives its own stream from it.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            wordnet_dir: PathBuf::new(),
            train: PathBuf::new(),
            splits: Vec::new(),
            out_dir: PathBuf::new(),
            method: None,
            use_generated: true,
            token: TokenAugmentConfig::default(),
            sentence: SentenceAugmentConfig::default(),
            trainer: ContrastiveConfig::default(),
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.train.as_os_str().is_empty() {
            return Err(PipelineError::BadConfig(
                "train corpus path is required".to_string(),
            ));
        }
        if self.out_dir.as_os_str().is_empty() {
            return Err(PipelineError::BadConfig("out_dir is required".to_string()));
        }
        if self.method.is_some() && self.wordnet_dir.as_os_str().is_empty() {
            return Err(PipelineError::BadConfig(
                "wordnet_dir is required when augmentation runs".to_string(),
            ));
        }
        let mut names = BTreeSet::new();
        for split in &self.splits {
            if split.name.is_empty() || split.path.as_os_str().is_empty() {
                return Err(PipelineError::BadConfig(
                    "every split needs a name and a path".to_string(),
                ));
            }
            if !names.insert(split.name.as_str()) {
                return Err(PipelineError::BadConfig(format!(
                    "duplicate split name {:?}",
                    split.name
                )));
            }
        }
        self.trainer.validate()?;
        self.sentence.validate()?;
        Ok(())
    }

    /// Reads a config from a json file.
    pub fn load(path: &Path) -> Result<PipelineConfig, PipelineError> {
        let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Short name for the training regime a config describes: `baseline` for
/// originals-only cross entropy, `scl`/`rcl` when a contrastive stage runs
/// without augmentation, `rda` when generated pairs join training, and
/// compounds like `rda-rcl` when both apply.
pub fn mode_name(cfg: &PipelineConfig) -> String {
    let augmented = cfg.method.is_some() && cfg.use_generated;
    let stem = if augmented { "rda" } else { "baseline" };
    match cfg.trainer.mode {
        ContrastiveMode::None => stem.to_string(),
        ContrastiveMode::Scl => {
            if augmented {
                "rda-scl".to_string()
            } else {
                "scl".to_string()
            }
        }
        ContrastiveMode::Rcl => {
            if augmented {
                "rda-rcl".to_string()
            } else {
                "rcl".to_string()
            }
        }
    }
}

/// Folds a stage name into the global seed so each pipeline stage draws from
/// its own reproducible random stream.
pub fn stage_seed(global: u64, stage: &str) -> u64 {
    fnv1a64(stage.as_bytes()) ^ global
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// What a finished run produced.
#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    /// Regime name recorded in the metrics file; see [`mode_name`].
    pub mode: String,
    /// Every file written, in write order.
    pub files: Vec<PathBuf>,
    /// Accuracy per split.
    pub report: ModeReport,
    pub train_report: TrainReport,
    /// Present when the sentence-level loop ran.
    pub loop_report: Option<LoopReport>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load_pairs_file(path: &Path) -> Result<Vec<SentencePair>, PipelineError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    Ok(load_pairs(BufReader::new(file))?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Runs augmentation, training, and evaluation per the config. Artifacts:
/// `sets.jsonl` (augmented sets, when augmentation runs), `report.json`
/// (loop history, when the sentence pass runs), `model.ckpt`,
/// `train_report.json`, and `metrics.json`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome, PipelineError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir).map_err(io_err(&cfg.out_dir))?;
    let originals = load_pairs_file(&cfg.train)?;

    let mut files = Vec::new();
    let mut sets: Vec<AugmentedSet> = Vec::new();
    let mut loop_report = None;
    if let Some(method) = cfg.method {
        let lexicon = Lexicon::load_dir(&cfg.wordnet_dir)?;
        let freq = FrequencyTable::build(&originals);
        if method.runs_token() {
            let mut token_cfg = cfg.token;
            token_cfg.seed = stage_seed(cfg.seed, "token-augment");
            sets.extend(augment_corpus(&originals, &lexicon, &freq, &token_cfg).sets);
        }
        if method.runs_sentence() {
            let mut sentence_cfg = cfg.sentence.clone();
            sentence_cfg.seed = stage_seed(cfg.seed, "sentence-augment");
            let mut generator =
                LexicalGenerator::new(&lexicon, &freq, stage_seed(cfg.seed, "sentence-generator"));
            let mut classifier =
                EncoderLoopClassifier::new(stage_seed(cfg.seed, "loop-classifier"));
            let (sentence_sets, report) = run_sentence_augmentation(
                &originals,
                &mut generator,
                &mut classifier,
                &sentence_cfg,
            )?;
            sets.extend(sentence_sets);
            let report_path = cfg.out_dir.join("report.json");
            write_json(&report_path, &report)?;
            files.push(report_path);
            loop_report = Some(report);
        }
        let sets_path = cfg.out_dir.join("sets.jsonl");
        let mut writer = BufWriter::new(fs::File::create(&sets_path).map_err(io_err(&sets_path))?);
        save_sets(&mut writer, &sets).map_err(io_err(&sets_path))?;
        writer.flush().map_err(io_err(&sets_path))?;
        files.push(sets_path);
    }

    // The cross-entropy train set is the originals plus, when enabled, every
    // accepted generated pair. The vocabulary comes from that same set, so a
    // run without generated pairs treats their new words as unknowns.
    let train_sets: &[AugmentedSet] = if cfg.use_generated { &sets } else { &[] };
    let mut vocab_pairs = originals.clone();
    for set in train_sets {
        vocab_pairs.extend(set.generated.values().cloned());
    }
    let vocab = Vocab::build(&vocab_pairs);
    let mut params = EncoderParams::init(
        vocab.len(),
        EncoderDims::default(),
        stage_seed(cfg.seed, "encoder-init"),
    );
    let mut trainer_cfg = cfg.trainer.clone();
    trainer_cfg.seed = stage_seed(cfg.seed, "train");
    let train_report = train(&mut params, &vocab, &originals, train_sets, &trainer_cfg)?;

    let checkpoint_path = cfg.out_dir.join("model.ckpt");
    save_checkpoint(&checkpoint_path, &vocab, &params)?;
    files.push(checkpoint_path);
    let train_report_path = cfg.out_dir.join("train_report.json");
    write_json(&train_report_path, &train_report)?;
    files.push(train_report_path);

    let mode = mode_name(cfg);
    let mut metrics: Vec<Metrics> = Vec::new();
    for split in &cfg.splits {
        let pairs = load_pairs_file(&split.path)?;
        metrics.push(evaluate(&params, &vocab, &pairs, &split.name)?);
    }
    let report = ModeReport {
        mode: mode.clone(),
        splits: metrics,
    };
    let metrics_path = cfg.out_dir.join("metrics.json");
    write_json(&metrics_path, &report)?;
    files.push(metrics_path);

    Ok(PipelineOutcome {
        mode,
        files,
        report,
        train_report,
        loop_report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{make_synthetic, SynthConfig, SynthFiles};

    #[test]
    fn stage_seed_is_stable_and_stage_dependent() {
        assert_eq!(stage_seed(42, "train"), stage_seed(42, "train"));
        assert_ne!(stage_seed(42, "train"), stage_seed(42, "token-augment"));
        assert_ne!(stage_seed(42, "train"), stage_seed(43, "train"));
        // The stage hash and the global seed combine by xor.
        assert_eq!(stage_seed(42, "train") ^ 42, stage_seed(0, "train"));
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = PipelineConfig {
            wordnet_dir: "wn".into(),
            train: "train.jsonl".into(),
            splits: vec![SplitSpec {
                name: "original".into(),
                path: "test.jsonl".into(),
            }],
            out_dir: "out".into(),
            method: Some(AugmentMethod::Both),
            use_generated: false,
            seed: 99,
            ..PipelineConfig::default()
        };
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: PipelineConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn empty_config_file_means_defaults() {
        let cfg: PipelineConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        assert!(cfg.use_generated);
        assert!(cfg.method.is_none());
    }

    #[test]
    fn mode_names_cover_the_four_regimes() {
        let mut cfg = PipelineConfig {
            train: "t".into(),
            out_dir: "o".into(),
            ..PipelineConfig::default()
        };
        assert_eq!(mode_name(&cfg), "baseline");
        cfg.trainer.mode = ContrastiveMode::Scl;
        assert_eq!(mode_name(&cfg), "scl");
        cfg.trainer.mode = ContrastiveMode::None;
        cfg.method = Some(AugmentMethod::Token);
        cfg.wordnet_dir = "wn".into();
        assert_eq!(mode_name(&cfg), "rda");
        cfg.trainer.mode = ContrastiveMode::Rcl;
        assert_eq!(mode_name(&cfg), "rda-rcl");
        // Augmentation artifacts without training on them count as baseline.
        cfg.use_generated = false;
        cfg.trainer.mode = ContrastiveMode::None;
        assert_eq!(mode_name(&cfg), "baseline");
    }

    #[test]
    fn split_specs_parse_name_equals_path() {
        let spec: SplitSpec = "rp=eval/test_rp.jsonl".parse().unwrap();
        assert_eq!(spec.name, "rp");
        assert_eq!(spec.path, PathBuf::from("eval/test_rp.jsonl"));
        assert!("no-separator".parse::<SplitSpec>().is_err());
        assert!("=path".parse::<SplitSpec>().is_err());
        assert!("name=".parse::<SplitSpec>().is_err());
    }

    #[test]
    fn validation_rejects_missing_and_duplicate_fields() {
        let cfg = PipelineConfig::default();
        let err = cfg.validate().unwrap_err();
        assert!(err.is_validation(), "{err}");

        let mut cfg = PipelineConfig {
            train: "t.jsonl".into(),
            out_dir: "out".into(),
            ..PipelineConfig::default()
        };
        cfg.method = Some(AugmentMethod::Token);
        assert!(cfg.validate().is_err(), "wordnet_dir required");
        cfg.method = None;
        cfg.splits = vec![
            SplitSpec {
                name: "a".into(),
                path: "a.jsonl".into(),
            },
            SplitSpec {
                name: "a".into(),
                path: "b.jsonl".into(),
            },
        ];
        assert!(cfg.validate().is_err(), "duplicate split names");
    }

    fn tiny_corpus(dir: &Path) -> SynthFiles {
        make_synthetic(
            &SynthConfig {
                seed: 5,
                n_train: 24,
                n_test: 6,
            },
            dir,
        )
        .unwrap()
    }

    fn fast_trainer() -> ContrastiveConfig {
        ContrastiveConfig {
            cl_epochs: 1,
            ce_epochs: 1,
            batch_size: 8,
            ..ContrastiveConfig::default()
        }
    }

    #[test]
    fn baseline_run_writes_model_and_metrics() {
        let dir = tempfile::tempdir().unwrap();
        let data = tiny_corpus(&dir.path().join("data"));
        let out = dir.path().join("out");
        let cfg = PipelineConfig {
            wordnet_dir: data.wordnet_dir.clone(),
            train: data.train.clone(),
            splits: data
                .splits
                .iter()
                .map(|(name, path)| SplitSpec {
                    name: name.clone(),
                    path: path.clone(),
                })
                .collect(),
            out_dir: out.clone(),
            trainer: fast_trainer(),
            ..PipelineConfig::default()
        };
        let outcome = run_pipeline(&cfg).unwrap();
        assert_eq!(outcome.mode, "baseline");
        assert!(out.join("model.ckpt").is_file());
        assert!(out.join("train_report.json").is_file());
        assert!(!out.join("sets.jsonl").exists(), "no augmentation ran");
        let report: ModeReport =
            serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
        assert_eq!(report.mode, "baseline");
        assert_eq!(report.splits.len(), 4);
        for metrics in &report.splits {
            assert_eq!(metrics.n, 6);
            assert!((0.0..=1.0).contains(&metrics.accuracy));
        }
    }

    #[test]
    fn token_run_writes_sets_and_repeats_byte_identically() {
        let dir = tempfile::tempdir().unwrap();
        let data = tiny_corpus(&dir.path().join("data"));
        let make_cfg = |out: PathBuf| PipelineConfig {
            wordnet_dir: data.wordnet_dir.clone(),
            train: data.train.clone(),
            splits: vec![SplitSpec {
                name: "original".into(),
                path: data.splits[0].1.clone(),
            }],
            out_dir: out,
            method: Some(AugmentMethod::Token),
            trainer: ContrastiveConfig {
                mode: ContrastiveMode::Rcl,
                ..fast_trainer()
            },
            seed: 11,
            ..PipelineConfig::default()
        };
        let first = run_pipeline(&make_cfg(dir.path().join("out1"))).unwrap();
        let second = run_pipeline(&make_cfg(dir.path().join("out2"))).unwrap();
        assert_eq!(first.mode, "rda-rcl");
        for name in ["sets.jsonl", "model.ckpt", "metrics.json"] {
            let a = fs::read(dir.path().join("out1").join(name)).unwrap();
            let b = fs::read(dir.path().join("out2").join(name)).unwrap();
            assert_eq!(a, b, "{name} must be byte-identical across reruns");
        }
        assert_eq!(
            first.train_report.param_checksum,
            second.train_report.param_checksum
        );
    }
}
