//! Command line front end for the augmentation and training toolkit.
//!
//! Subcommands cover the whole workflow: synthesizing the bundled benchmark,
//! sanity-checking a lexicon directory, expanding a corpus into augmented
//! sets, training the pair encoder, scoring checkpoints on labeled splits,
//! comparing finished runs, and driving all of it end to end.

use std::fs;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cfnli::augment::sentence::{
    run_sentence_augmentation, EncoderLoopClassifier, LexicalGenerator, LoopReport,
    SentenceAugmentConfig,
};
use cfnli::augment::token::{augment_corpus, TokenAugmentConfig};
use cfnli::corpus::{load_pairs, load_sets, save_sets, AugmentedSet, FrequencyTable, SentencePair};
use cfnli::encoder::{load_checkpoint, save_checkpoint, EncoderDims, EncoderParams, Vocab};
use cfnli::eval::{compare, evaluate, ModeReport};
use cfnli::pipeline::{
    run_pipeline, stage_seed, AugmentMethod, PipelineConfig, PipelineError, SplitSpec,
};
use cfnli::synth::{make_loop_corpus, make_synthetic, SynthConfig};
use cfnli::train::{train, ContrastiveConfig, ContrastiveMode};
use cfnli::wordnet::Lexicon;

#[derive(Parser)]
#[command(
    name = "cfnli",
    version,
    about = "Counterfactual augmentation and contrastive training for sentence-pair inference"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the self-contained synthetic benchmark
    Synth(SynthArgs),
    /// Load a lexicon directory and report its shape
    WordnetCheck(WordnetCheckArgs),
    /// Expand a labeled corpus into augmented sets
    Augment(AugmentArgs),
    /// Train the pair encoder on originals plus optional augmented sets
    Train(TrainArgs),
    /// Score a checkpoint on labeled splits
    Eval(EvalArgs),
    /// Merge metrics files into one accuracy table
    Compare(CompareArgs),
    /// Run augmentation, training, and evaluation end to end
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Directory the benchmark is written into
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Training pairs to generate
    #[arg(long, default_value_t = 2000)]
    train_size: usize,
    /// Pairs per test split
    #[arg(long, default_value_t = 600)]
    test_size: usize,
    /// Also write loop.jsonl, a three-label corpus sized for the
    /// sentence-level loop
    #[arg(long)]
    loop_size: Option<usize>,
}

#[derive(Args)]
struct WordnetCheckArgs {
    /// Lexicon directory holding data.noun and index.noun
    #[arg(long, env = "CFNLI_WORDNET_DIR")]
    wordnet_dir: PathBuf,
}

#[derive(Args)]
struct AugmentArgs {
    /// Which pass to run: token, sentence, or both
    #[arg(long)]
    method: AugmentMethod,
    #[arg(long, env = "CFNLI_WORDNET_DIR")]
    wordnet_dir: PathBuf,
    /// Corpus to expand (jsonl pairs)
    #[arg(long)]
    pairs: PathBuf,
    /// Where the augmented sets are written (jsonl)
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Additive smoothing for frequency-weighted candidate sampling
    #[arg(long, default_value_t = 1)]
    smoothing: u64,
    /// Acceptance threshold for the sentence-level filter
    #[arg(long, default_value_t = SentenceAugmentConfig::default().tau)]
    tau: f64,
    /// Fraction of complete sets at which the loop stops
    #[arg(long, default_value_t = SentenceAugmentConfig::default().coverage_goal)]
    coverage_goal: f64,
    #[arg(long, default_value_t = SentenceAugmentConfig::default().max_iterations)]
    max_iterations: usize,
    /// Also write the loop history as json
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Original training corpus (jsonl pairs)
    #[arg(long)]
    pairs: PathBuf,
    /// Augmented sets to train on alongside the originals (jsonl)
    #[arg(long)]
    sets: Option<PathBuf>,
    /// Checkpoint path
    #[arg(long)]
    out: PathBuf,
    /// Contrastive stage: rcl, scl, or none
    #[arg(long, default_value = "none")]
    mode: ContrastiveMode,
    #[arg(long, default_value_t = ContrastiveConfig::default().temperature)]
    temperature: f64,
    #[arg(long, default_value_t = ContrastiveConfig::default().cl_epochs)]
    cl_epochs: usize,
    #[arg(long, default_value_t = ContrastiveConfig::default().cl_lr)]
    cl_lr: f64,
    #[arg(long, default_value_t = ContrastiveConfig::default().ce_epochs)]
    ce_epochs: usize,
    #[arg(long, default_value_t = ContrastiveConfig::default().ce_lr)]
    ce_lr: f64,
    #[arg(long, default_value_t = ContrastiveConfig::default().batch_size)]
    batch_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the loss history as json
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Checkpoint to score
    #[arg(long)]
    model: PathBuf,
    /// Split to score as name=path; repeatable
    #[arg(long, required = true)]
    split: Vec<SplitSpec>,
    /// Mode name recorded in the metrics file
    #[arg(long, default_value = "model")]
    label: String,
    /// Also write the metrics as json
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Metrics files produced by eval or pipeline runs
    #[arg(required = true)]
    metrics: Vec<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Base config (json); flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "CFNLI_WORDNET_DIR")]
    wordnet_dir: Option<PathBuf>,
    #[arg(long)]
    train: Option<PathBuf>,
    /// Split as name=path; repeatable, replaces the config's list when given
    #[arg(long)]
    split: Vec<SplitSpec>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Augmentation pass: token, sentence, or both
    #[arg(long)]
    method: Option<AugmentMethod>,
    /// Run augmentation but train on the originals alone
    #[arg(long)]
    no_generated: bool,
    /// Contrastive stage: rcl, scl, or none
    #[arg(long)]
    mode: Option<ContrastiveMode>,
    #[arg(long)]
    seed: Option<u64>,
    /// Acceptance threshold for the sentence-level filter
    #[arg(long)]
    tau: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => run_synth(args),
        Command::WordnetCheck(args) => run_wordnet_check(args),
        Command::Augment(args) => run_augment(args),
        Command::Train(args) => run_train(args),
        Command::Eval(args) => run_eval(args),
        Command::Compare(args) => run_compare(args),
        Command::Pipeline(args) => run_pipeline_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Bad configuration exits with 1, failures while running with 2.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<PipelineError>() {
        Some(e) if e.is_validation() => 1,
        _ => 2,
    }
}

fn read_pairs(path: &Path) -> Result<Vec<SentencePair>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let pairs =
        load_pairs(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    Ok(pairs)
}

fn read_sets(path: &Path) -> Result<Vec<AugmentedSet>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let sets =
        load_sets(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    Ok(sets)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn print_loop_report(report: &LoopReport) {
    for it in &report.iterations {
        eprintln!(
            "iteration {}: coverage {:.4}, accepted {}, generator failures {}",
            it.iteration, it.coverage, it.accepted, it.generator_failures
        );
    }
    eprintln!(
        "loop stopped ({:?}) at coverage {:.4}",
        report.stop_reason, report.final_coverage
    );
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let cfg = SynthConfig {
        seed: args.seed,
        n_train: args.train_size,
        n_test: args.test_size,
    };
    let files = make_synthetic(&cfg, &args.out).context("generating the benchmark")?;
    println!("wrote {}", files.wordnet_dir.display());
    println!("wrote {}", files.train.display());
    for (_, path) in &files.splits {
        println!("wrote {}", path.display());
    }
    if let Some(n) = args.loop_size {
        let path = args.out.join("loop.jsonl");
        make_loop_corpus(args.seed, n, &path).context("generating the loop corpus")?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_wordnet_check(args: WordnetCheckArgs) -> Result<()> {
    let lexicon = Lexicon::load_dir(&args.wordnet_dir).map_err(PipelineError::Lexicon)?;
    println!("synsets: {}", lexicon.synset_count());
    println!("lemmas:  {}", lexicon.lemma_count());
    let violations = lexicon.edge_violations();
    if violations > 0 {
        bail!("relation graph has {violations} one-way taxonomy edge(s)");
    }
    println!("taxonomy edges are symmetric");
    Ok(())
}

fn run_augment(args: AugmentArgs) -> Result<()> {
    let pairs = read_pairs(&args.pairs)?;
    let lexicon = Lexicon::load_dir(&args.wordnet_dir).map_err(PipelineError::Lexicon)?;
    let freq = FrequencyTable::build(&pairs);
    let mut sets: Vec<AugmentedSet> = Vec::new();
    if matches!(args.method, AugmentMethod::Token | AugmentMethod::Both) {
        let cfg = TokenAugmentConfig {
            seed: stage_seed(args.seed, "token-augment"),
            smoothing: args.smoothing,
            ..TokenAugmentConfig::default()
        };
        let run = augment_corpus(&pairs, &lexicon, &freq, &cfg);
        if !run.no_noun_groups.is_empty() {
            eprintln!(
                "{} group(s) had no substitutable noun",
                run.no_noun_groups.len()
            );
        }
        sets.extend(run.sets);
    }
    if matches!(args.method, AugmentMethod::Sentence | AugmentMethod::Both) {
        let cfg = SentenceAugmentConfig {
            tau: args.tau,
            coverage_goal: args.coverage_goal,
            max_iterations: args.max_iterations,
            seed: stage_seed(args.seed, "sentence-augment"),
        };
        let mut generator =
            LexicalGenerator::new(&lexicon, &freq, stage_seed(args.seed, "sentence-generator"));
        let mut classifier = EncoderLoopClassifier::new(stage_seed(args.seed, "loop-classifier"));
        let (sentence_sets, report) =
            run_sentence_augmentation(&pairs, &mut generator, &mut classifier, &cfg)
                .map_err(PipelineError::Augment)?;
        print_loop_report(&report);
        if let Some(path) = &args.report {
            write_json(path, &report)?;
        }
        sets.extend(sentence_sets);
    }
    let file =
        fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut writer = BufWriter::new(file);
    save_sets(&mut writer, &sets).with_context(|| format!("writing {}", args.out.display()))?;
    writer.flush()?;
    let complete = sets.iter().filter(|s| s.is_complete()).count();
    println!(
        "wrote {} ({} sets, {} complete)",
        args.out.display(),
        sets.len(),
        complete
    );
    Ok(())
}

fn run_train(args: TrainArgs) -> Result<()> {
    let originals = read_pairs(&args.pairs)?;
    let sets = match &args.sets {
        Some(path) => read_sets(path)?,
        None => Vec::new(),
    };
    let cfg = ContrastiveConfig {
        temperature: args.temperature,
        cl_epochs: args.cl_epochs,
        cl_lr: args.cl_lr,
        ce_epochs: args.ce_epochs,
        ce_lr: args.ce_lr,
        batch_size: args.batch_size,
        mode: args.mode,
        seed: stage_seed(args.seed, "train"),
    };
    let mut vocab_pairs = originals.clone();
    for set in &sets {
        vocab_pairs.extend(set.generated.values().cloned());
    }
    let vocab = Vocab::build(&vocab_pairs);
    let mut params = EncoderParams::init(
        vocab.len(),
        EncoderDims::default(),
        stage_seed(args.seed, "encoder-init"),
    );
    let report =
        train(&mut params, &vocab, &originals, &sets, &cfg).map_err(PipelineError::Train)?;
    save_checkpoint(&args.out, &vocab, &params).map_err(PipelineError::Encoder)?;
    println!("wrote {}", args.out.display());
    if let Some(loss) = report.contrastive_losses.last() {
        println!("final {} loss {loss:.6}", args.mode.as_str());
    }
    if let Some(loss) = report.cross_entropy_losses.last() {
        println!("final ce loss {loss:.6}");
    }
    println!("parameter checksum {}", report.param_checksum);
    if let Some(path) = &args.report {
        write_json(path, &report)?;
    }
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let (vocab, params) = load_checkpoint(&args.model).map_err(PipelineError::Encoder)?;
    let mut metrics = Vec::new();
    for split in &args.split {
        let pairs = read_pairs(&split.path)?;
        metrics.push(evaluate(&params, &vocab, &pairs, &split.name).map_err(PipelineError::Eval)?);
    }
    let report = ModeReport {
        mode: args.label.clone(),
        splits: metrics,
    };
    print!("{}", compare(std::slice::from_ref(&report)));
    if let Some(path) = &args.out {
        write_json(path, &report)?;
    }
    Ok(())
}

fn run_compare(args: CompareArgs) -> Result<()> {
    let mut reports = Vec::new();
    for path in &args.metrics {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let report: ModeReport =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        reports.push(report);
    }
    print!("{}", compare(&reports));
    Ok(())
}

fn run_pipeline_cmd(args: PipelineArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(dir) = args.wordnet_dir {
        cfg.wordnet_dir = dir;
    }
    if let Some(train) = args.train {
        cfg.train = train;
    }
    if !args.split.is_empty() {
        cfg.splits = args.split;
    }
    if let Some(out_dir) = args.out_dir {
        cfg.out_dir = out_dir;
    }
    if let Some(method) = args.method {
        cfg.method = Some(method);
    }
    if args.no_generated {
        cfg.use_generated = false;
    }
    if let Some(mode) = args.mode {
        cfg.trainer.mode = mode;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(tau) = args.tau {
        cfg.sentence.tau = tau;
    }
    let outcome = run_pipeline(&cfg)?;
    if let Some(report) = &outcome.loop_report {
        print_loop_report(report);
    }
    println!("mode: {}", outcome.mode);
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
    print!("{}", compare(std::slice::from_ref(&outcome.report)));
    Ok(())
}
