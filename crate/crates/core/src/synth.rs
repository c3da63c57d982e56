//! Self-contained synthetic benchmark generator.
//!
//! Builds a small noun taxonomy rendered in the lexicon database format plus
//! template sentence pairs whose labels follow from the relation between the
//! two nouns involved: two names for one synset entail each other, a parent
//! term leaves a child term undetermined, and siblings or antonyms contradict.
//! Everything is deterministic per seed, so downstream regression tests can
//! pin exact numbers.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{save_pairs, Label, SentencePair, Side};
use crate::pipeline::stage_seed;
use crate::wordnet::{write_wndb_dir, RelationKind, SynsetDef};

/// Errors from synthetic corpus generation.
#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic corpus config: {0}")]
    BadConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A premise-side taxonomy group: one parent synset with two child synsets
/// that act as sibling anchors.
struct GroupA {
    parent: [&'static str; 2],
    first: [&'static str; 2],
    second: [&'static str; 2],
}

const WORLD_A: [GroupA; 3] = [
    GroupA {
        parent: ["person", "individual"],
        first: ["musician", "instrumentalist"],
        second: ["worker", "laborer"],
    },
    GroupA {
        parent: ["vehicle", "conveyance"],
        first: ["car", "automobile"],
        second: ["wagon", "cart"],
    },
    GroupA {
        parent: ["building", "edifice"],
        first: ["house", "dwelling"],
        second: ["barn", "stable"],
    },
];

/// A hypothesis-side taxonomy group: two mutually antonymous top-level
/// synsets, each with two child synsets.
struct GroupB {
    left: [&'static str; 2],
    left_children: [[&'static str; 2]; 2],
    right: [&'static str; 2],
    right_children: [[&'static str; 2]; 2],
}

const WORLD_B: [GroupB; 3] = [
    GroupB {
        left: ["dog", "doggy"],
        left_children: [["puppy", "whelp"], ["hound", "mutt"]],
        right: ["cat", "kitty"],
        right_children: [["kitten", "kitling"], ["tabby", "mouser"]],
    },
    GroupB {
        left: ["bird", "fowl"],
        left_children: [["sparrow", "spadger"], ["eagle", "ern"]],
        right: ["fish", "gamefish"],
        right_children: [["trout", "char"], ["salmon", "grilse"]],
    },
    GroupB {
        left: ["tree", "sapling"],
        left_children: [["oak", "blackjack"], ["pine", "longleaf"]],
        right: ["flower", "bloom"],
        right_children: [["rose", "rosebush"], ["tulip", "tulipa"]],
    },
];

/// Sentence templates; `{}` is the single noun slot. Sentences are kept to
/// two tokens so the noun dominates the mean-pooled embedding; filler verbs
/// never collide with taxonomy lemmas, so every sentence contains exactly one
/// lexicon noun.
const FRAMES: [&str; 12] = [
    "{} waits",
    "{} rests",
    "{} moves",
    "{} sleeps",
    "{} turns",
    "{} lingers",
    "{} stops",
    "{} appears",
    "{} drifts",
    "{} settles",
    "{} leans",
    "{} stands",
];

fn synset_id(n: usize) -> String {
    format!("{n:08}")
}

/// The full fixture taxonomy: three premise-side groups, three
/// hypothesis-side groups, and a spare branch used only by unit tests.
pub fn taxonomy() -> Vec<SynsetDef> {
    let mut defs = Vec::new();
    for (g, group) in WORLD_A.iter().enumerate() {
        let base = 3 * g + 1;
        defs.push(SynsetDef::new(&synset_id(base), &group.parent));
        defs.push(SynsetDef::new(&synset_id(base + 1), &group.first).under(&synset_id(base)));
        defs.push(SynsetDef::new(&synset_id(base + 2), &group.second).under(&synset_id(base)));
    }
    for (g, group) in WORLD_B.iter().enumerate() {
        let base = 10 + 6 * g;
        let left_id = synset_id(base);
        let right_id = synset_id(base + 3);
        defs.push(
            SynsetDef::new(&left_id, &group.left)
                .antonym(1, &right_id, 1)
                .antonym(2, &right_id, 2),
        );
        defs.push(SynsetDef::new(&synset_id(base + 1), &group.left_children[0]).under(&left_id));
        defs.push(SynsetDef::new(&synset_id(base + 2), &group.left_children[1]).under(&left_id));
        defs.push(
            SynsetDef::new(&right_id, &group.right)
                .antonym(1, &left_id, 1)
                .antonym(2, &left_id, 2),
        );
        defs.push(SynsetDef::new(&synset_id(base + 4), &group.right_children[0]).under(&right_id));
        defs.push(SynsetDef::new(&synset_id(base + 5), &group.right_children[1]).under(&right_id));
    }
    // Spare branch for unit tests elsewhere; these lemmas never appear in the
    // sentence templates, so generated corpora never mention them.
    let time = synset_id(28);
    let day = synset_id(29);
    let night = synset_id(31);
    defs.push(SynsetDef::new(&time, &["time", "duration"]));
    defs.push(
        SynsetDef::new(&day, &["day", "daytime"])
            .under(&time)
            .antonym(1, &night, 1)
            .antonym(2, &night, 2),
    );
    defs.push(SynsetDef::new(&synset_id(30), &["morning"]).under(&day));
    defs.push(
        SynsetDef::new(&night, &["night", "nighttime"])
            .under(&time)
            .antonym(1, &day, 1)
            .antonym(2, &day, 2),
    );
    defs.push(SynsetDef::new(&synset_id(32), &["midnight"]).under(&night));
    defs
}

fn fill(frame: &str, lemma: &str) -> String {
    frame.replace("{}", lemma)
}

/// Fraction of entailment pairs in the unrevised corpus. One third keeps the
/// combined train set (originals plus one generated pair per class) close to
/// label-balanced.
const ENTAILMENT_SHARE: f64 = 1.0 / 3.0;

/// One training pair whose to-be-revised noun sits in the premise.
fn world_a_pair(rng: &mut ChaCha8Rng) -> SentencePair {
    let group = &WORLD_A[rng.random_range(0..WORLD_A.len())];
    let frame = FRAMES[rng.random_range(0..FRAMES.len())];
    if rng.random_bool(ENTAILMENT_SHARE) {
        let synset = if rng.random_bool(0.5) {
            &group.first
        } else {
            &group.second
        };
        let a = rng.random_range(0..2);
        SentencePair::new(
            fill(frame, synset[1 - a]),
            fill(frame, synset[a]),
            Label::Entailment,
        )
    } else {
        let (from, to) = if rng.random_bool(0.5) {
            (&group.first, &group.second)
        } else {
            (&group.second, &group.first)
        };
        SentencePair::new(
            fill(frame, from[rng.random_range(0..2)]),
            fill(frame, to[rng.random_range(0..2)]),
            Label::Contradiction,
        )
    }
}

/// One training pair whose to-be-revised noun sits in the hypothesis.
fn world_b_pair(rng: &mut ChaCha8Rng) -> SentencePair {
    let group = &WORLD_B[rng.random_range(0..WORLD_B.len())];
    let frame = FRAMES[rng.random_range(0..FRAMES.len())];
    if rng.random_bool(ENTAILMENT_SHARE) {
        let synset = if rng.random_bool(0.5) {
            &group.left
        } else {
            &group.right
        };
        let a = rng.random_range(0..2);
        SentencePair::new(
            fill(frame, synset[1 - a]),
            fill(frame, synset[a]),
            Label::Entailment,
        )
    } else {
        let (from, to) = if rng.random_bool(0.5) {
            (&group.left, &group.right)
        } else {
            (&group.right, &group.left)
        };
        SentencePair::new(
            fill(frame, from[rng.random_range(0..2)]),
            fill(frame, to[rng.random_range(0..2)]),
            Label::Contradiction,
        )
    }
}

/// Entailment/contradiction pairs alternating between premise-side and
/// hypothesis-side vocabulary, matching the alternating side policy of the
/// token-level augmenter.
fn original_pairs(seed: u64, n: usize) -> Vec<SentencePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            if i % 2 == 0 {
                world_a_pair(&mut rng)
            } else {
                world_b_pair(&mut rng)
            }
        })
        .collect()
}

/// A revised evaluation pair together with the base pair and the substitution
/// that produced it, so tests can re-derive the expected label independently.
#[derive(Clone, Debug)]
pub struct RevisionRecord {
    pub pair: SentencePair,
    pub base: SentencePair,
    pub from: String,
    pub to: String,
    pub kind: RelationKind,
    pub side: Side,
}

/// Builds one premise-revised pair with the requested label.
fn premise_revision(rng: &mut ChaCha8Rng, target: Label) -> RevisionRecord {
    let group = &WORLD_A[rng.random_range(0..WORLD_A.len())];
    let frame = FRAMES[rng.random_range(0..FRAMES.len())];
    match target {
        Label::Entailment => {
            // Contradiction base whose premise noun steps across to the
            // hypothesis synset, collapsing the pair into two synonyms.
            let (anchor, other) = if rng.random_bool(0.5) {
                (&group.first, &group.second)
            } else {
                (&group.second, &group.first)
            };
            let a = rng.random_range(0..2);
            let from = other[rng.random_range(0..2)];
            let to = anchor[1 - a];
            RevisionRecord {
                pair: SentencePair::new(fill(frame, to), fill(frame, anchor[a]), Label::Entailment),
                base: SentencePair::new(
                    fill(frame, from),
                    fill(frame, anchor[a]),
                    Label::Contradiction,
                ),
                from: from.to_string(),
                to: to.to_string(),
                kind: RelationKind::CoHyponym,
                side: Side::Premise,
            }
        }
        Label::Neutral => {
            // Entailment base generalised by naming the premise noun's parent.
            let synset = if rng.random_bool(0.5) {
                &group.first
            } else {
                &group.second
            };
            let a = rng.random_range(0..2);
            let from = synset[1 - a];
            let to = group.parent[rng.random_range(0..2)];
            RevisionRecord {
                pair: SentencePair::new(fill(frame, to), fill(frame, synset[a]), Label::Neutral),
                base: SentencePair::new(
                    fill(frame, from),
                    fill(frame, synset[a]),
                    Label::Entailment,
                ),
                from: from.to_string(),
                to: to.to_string(),
                kind: RelationKind::Hypernym,
                side: Side::Premise,
            }
        }
        Label::Contradiction => {
            // Entailment base pushed sideways onto the sibling synset.
            let (synset, sibling) = if rng.random_bool(0.5) {
                (&group.first, &group.second)
            } else {
                (&group.second, &group.first)
            };
            let a = rng.random_range(0..2);
            let from = synset[1 - a];
            let to = sibling[rng.random_range(0..2)];
            RevisionRecord {
                pair: SentencePair::new(
                    fill(frame, to),
                    fill(frame, synset[a]),
                    Label::Contradiction,
                ),
                base: SentencePair::new(
                    fill(frame, from),
                    fill(frame, synset[a]),
                    Label::Entailment,
                ),
                from: from.to_string(),
                to: to.to_string(),
                kind: RelationKind::CoHyponym,
                side: Side::Premise,
            }
        }
    }
}

/// Builds one hypothesis-revised pair with the requested label.
fn hypothesis_revision(rng: &mut ChaCha8Rng, target: Label) -> RevisionRecord {
    let group = &WORLD_B[rng.random_range(0..WORLD_B.len())];
    let frame = FRAMES[rng.random_range(0..FRAMES.len())];
    match target {
        Label::Entailment => {
            // Contradiction base whose hypothesis noun flips to its antonym,
            // landing in the premise synset.
            let (anchor, opposite) = if rng.random_bool(0.5) {
                (&group.left, &group.right)
            } else {
                (&group.right, &group.left)
            };
            let b = rng.random_range(0..2);
            let from = opposite[b];
            let to = anchor[b];
            let premise = fill(frame, anchor[1 - b]);
            RevisionRecord {
                pair: SentencePair::new(premise.clone(), fill(frame, to), Label::Entailment),
                base: SentencePair::new(premise, fill(frame, from), Label::Contradiction),
                from: from.to_string(),
                to: to.to_string(),
                kind: RelationKind::Antonym,
                side: Side::Hypothesis,
            }
        }
        Label::Neutral => {
            // Entailment base specialised by naming one of the hypothesis
            // noun's children.
            let (synset, children) = if rng.random_bool(0.5) {
                (&group.left, &group.left_children)
            } else {
                (&group.right, &group.right_children)
            };
            let a = rng.random_range(0..2);
            let from = synset[a];
            let child = &children[rng.random_range(0..2)];
            let to = child[rng.random_range(0..2)];
            let premise = fill(frame, synset[1 - a]);
            RevisionRecord {
                pair: SentencePair::new(premise.clone(), fill(frame, to), Label::Neutral),
                base: SentencePair::new(premise, fill(frame, from), Label::Entailment),
                from: from.to_string(),
                to: to.to_string(),
                kind: RelationKind::Hyponym,
                side: Side::Hypothesis,
            }
        }
        Label::Contradiction => {
            // Entailment base flipped by swapping the hypothesis noun for its
            // antonym in the opposing synset.
            let (synset, opposite) = if rng.random_bool(0.5) {
                (&group.left, &group.right)
            } else {
                (&group.right, &group.left)
            };
            let a = rng.random_range(0..2);
            let from = synset[a];
            let to = opposite[a];
            let premise = fill(frame, synset[1 - a]);
            RevisionRecord {
                pair: SentencePair::new(premise.clone(), fill(frame, to), Label::Contradiction),
                base: SentencePair::new(premise, fill(frame, from), Label::Entailment),
                from: from.to_string(),
                to: to.to_string(),
                kind: RelationKind::Antonym,
                side: Side::Hypothesis,
            }
        }
    }
}

/// Premise-revised evaluation pairs; labels cycle through all three classes.
pub fn premise_revision_records(seed: u64, n: usize) -> Vec<RevisionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| premise_revision(&mut rng, Label::ALL[i % 3]))
        .collect()
}

/// Hypothesis-revised evaluation pairs; labels cycle through all three
/// classes.
pub fn hypothesis_revision_records(seed: u64, n: usize) -> Vec<RevisionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| hypothesis_revision(&mut rng, Label::ALL[i % 3]))
        .collect()
}

/// Evaluation pairs revised on alternating sides, cycling through all three
/// labels.
pub fn mixed_revision_records(seed: u64, n: usize) -> Vec<RevisionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let target = Label::ALL[i % 3];
            if i % 2 == 0 {
                premise_revision(&mut rng, target)
            } else {
                hypothesis_revision(&mut rng, target)
            }
        })
        .collect()
}

fn write_jsonl(path: &Path, pairs: &[SentencePair]) -> Result<(), SynthError> {
    let mut writer = BufWriter::new(fs::File::create(path)?);
    save_pairs(&mut writer, pairs)?;
    writer.flush()?;
    Ok(())
}

/// Generation parameters for [`make_synthetic`].
#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            n_train: 2000,
            n_test: 600,
        }
    }
}

/// Paths written by [`make_synthetic`]: the lexicon directory, the training
/// corpus, and the four evaluation splits in report order.
#[derive(Clone, Debug)]
pub struct SynthFiles {
    pub wordnet_dir: PathBuf,
    pub train: PathBuf,
    pub splits: Vec<(String, PathBuf)>,
}

/// Writes the fixture lexicon, a training corpus, and four evaluation splits
/// (unrevised, premise-revised, hypothesis-revised, both-revised) under
/// `out_dir`. Deterministic per seed.
pub fn make_synthetic(cfg: &SynthConfig, out_dir: &Path) -> Result<SynthFiles, SynthError> {
    if cfg.n_train == 0 {
        return Err(SynthError::BadConfig("n_train must be at least 1".into()));
    }
    if cfg.n_test == 0 {
        return Err(SynthError::BadConfig("n_test must be at least 1".into()));
    }
    fs::create_dir_all(out_dir)?;
    let wordnet_dir = out_dir.join("wordnet");
    write_wndb_dir(&taxonomy(), &wordnet_dir)?;

    let train = out_dir.join("train.jsonl");
    write_jsonl(
        &train,
        &original_pairs(stage_seed(cfg.seed, "synth-train"), cfg.n_train),
    )?;

    let original = out_dir.join("test_original.jsonl");
    write_jsonl(
        &original,
        &original_pairs(stage_seed(cfg.seed, "synth-test-original"), cfg.n_test),
    )?;

    let rp = out_dir.join("test_rp.jsonl");
    let rp_pairs: Vec<SentencePair> =
        premise_revision_records(stage_seed(cfg.seed, "synth-test-rp"), cfg.n_test)
            .into_iter()
            .map(|r| r.pair)
            .collect();
    write_jsonl(&rp, &rp_pairs)?;

    let rh = out_dir.join("test_rh.jsonl");
    let rh_pairs: Vec<SentencePair> =
        hypothesis_revision_records(stage_seed(cfg.seed, "synth-test-rh"), cfg.n_test)
            .into_iter()
            .map(|r| r.pair)
            .collect();
    write_jsonl(&rh, &rh_pairs)?;

    let rprh = out_dir.join("test_rprh.jsonl");
    let rprh_pairs: Vec<SentencePair> =
        mixed_revision_records(stage_seed(cfg.seed, "synth-test-rprh"), cfg.n_test)
            .into_iter()
            .map(|r| r.pair)
            .collect();
    write_jsonl(&rprh, &rprh_pairs)?;

    Ok(SynthFiles {
        wordnet_dir,
        train,
        splits: vec![
            ("original".to_string(), original),
            ("rp".to_string(), rp),
            ("rh".to_string(), rh),
            ("rprh".to_string(), rprh),
        ],
    })
}

fn loop_pair_a(rng: &mut ChaCha8Rng, label: Label) -> SentencePair {
    let group = &WORLD_A[rng.random_range(0..WORLD_A.len())];
    let frame = FRAMES[rng.random_range(0..FRAMES.len())];
    match label {
        Label::Entailment => {
            let synset = if rng.random_bool(0.5) {
                &group.first
            } else {
                &group.second
            };
            let a = rng.random_range(0..2);
            SentencePair::new(fill(frame, synset[1 - a]), fill(frame, synset[a]), label)
        }
        Label::Neutral => {
            let child = if rng.random_bool(0.5) {
                &group.first
            } else {
                &group.second
            };
            SentencePair::new(
                fill(frame, group.parent[rng.random_range(0..2)]),
                fill(frame, child[rng.random_range(0..2)]),
                label,
            )
        }
        Label::Contradiction => {
            let (from, to) = if rng.random_bool(0.5) {
                (&group.first, &group.second)
            } else {
                (&group.second, &group.first)
            };
            SentencePair::new(
                fill(frame, from[rng.random_range(0..2)]),
                fill(frame, to[rng.random_range(0..2)]),
                label,
            )
        }
    }
}

fn loop_pair_b(rng: &mut ChaCha8Rng, label: Label) -> SentencePair {
    let group = &WORLD_B[rng.random_range(0..WORLD_B.len())];
    let frame = FRAMES[rng.random_range(0..FRAMES.len())];
    match label {
        Label::Entailment => {
            let synset = if rng.random_bool(0.5) {
                &group.left
            } else {
                &group.right
            };
            let a = rng.random_range(0..2);
            SentencePair::new(fill(frame, synset[1 - a]), fill(frame, synset[a]), label)
        }
        Label::Neutral => {
            let (synset, children) = if rng.random_bool(0.5) {
                (&group.left, &group.left_children)
            } else {
                (&group.right, &group.right_children)
            };
            let child = &children[rng.random_range(0..2)];
            SentencePair::new(
                fill(frame, synset[rng.random_range(0..2)]),
                fill(frame, child[rng.random_range(0..2)]),
                label,
            )
        }
        Label::Contradiction => {
            let (from, to) = if rng.random_bool(0.5) {
                (&group.left, &group.right)
            } else {
                (&group.right, &group.left)
            };
            SentencePair::new(
                fill(frame, from[rng.random_range(0..2)]),
                fill(frame, to[rng.random_range(0..2)]),
                label,
            )
        }
    }
}

/// Writes a training corpus covering all three labels natively: synonym pairs
/// entail, parent/child pairs are neutral, sibling or antonym pairs
/// contradict. Meant for the sentence-level loop, whose filter classifier
/// needs examples of every label before it can accept candidates with high
/// confidence.
pub fn make_loop_corpus(seed: u64, n: usize, path: &Path) -> Result<(), SynthError> {
    if n == 0 {
        return Err(SynthError::BadConfig("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<SentencePair> = (0..n)
        .map(|i| {
            let label = Label::ALL[i % 3];
            if i % 2 == 0 {
                loop_pair_a(&mut rng, label)
            } else {
                loop_pair_b(&mut rng, label)
            }
        })
        .collect();
    write_jsonl(path, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_pairs, tokenize};
    use crate::wordnet::Lexicon;
    use std::io::BufReader;

    fn load_fixture_lexicon() -> Lexicon {
        let dir = tempfile::tempdir().unwrap();
        write_wndb_dir(&taxonomy(), dir.path()).unwrap();
        Lexicon::load_dir(dir.path()).unwrap()
    }

    fn read_pairs(path: &Path) -> Vec<SentencePair> {
        load_pairs(BufReader::new(fs::File::open(path).unwrap())).unwrap()
    }

    #[test]
    fn taxonomy_loads_cleanly() {
        let lex = load_fixture_lexicon();
        assert_eq!(lex.synset_count(), 32);
        assert_eq!(lex.edge_violations(), 0);
        let mut parents = lex.candidates("musician", RelationKind::Hypernym);
        parents.sort();
        assert_eq!(parents, ["individual", "person"]);
        assert_eq!(lex.candidates("dog", RelationKind::Antonym), ["cat"]);
        assert_eq!(lex.candidates("kitty", RelationKind::Antonym), ["doggy"]);
        let mut kids = lex.candidates("fish", RelationKind::Hyponym);
        kids.sort();
        assert_eq!(kids, ["char", "grilse", "salmon", "trout"]);
        let mut sibs = lex.candidates("barn", RelationKind::CoHyponym);
        sibs.sort();
        assert_eq!(sibs, ["dwelling", "house"]);
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let cfg = SynthConfig {
            seed: 7,
            n_train: 40,
            n_test: 12,
        };
        let a = make_synthetic(&cfg, dir_a.path()).unwrap();
        let b = make_synthetic(&cfg, dir_b.path()).unwrap();
        assert_eq!(
            fs::read(&a.train).unwrap(),
            fs::read(&b.train).unwrap(),
            "same seed must give identical training bytes"
        );
        for ((_, pa), (_, pb)) in a.splits.iter().zip(&b.splits) {
            assert_eq!(fs::read(pa).unwrap(), fs::read(pb).unwrap());
        }
        let other = tempfile::tempdir().unwrap();
        let changed = make_synthetic(
            &SynthConfig {
                seed: 8,
                ..cfg.clone()
            },
            other.path(),
        )
        .unwrap();
        assert_ne!(
            fs::read(&a.train).unwrap(),
            fs::read(&changed.train).unwrap()
        );
    }

    #[test]
    fn single_pair_corpus_is_loadable() {
        let dir = tempfile::tempdir().unwrap();
        let files = make_synthetic(
            &SynthConfig {
                seed: 0,
                n_train: 1,
                n_test: 1,
            },
            dir.path(),
        )
        .unwrap();
        assert_eq!(read_pairs(&files.train).len(), 1);
        for (_, path) in &files.splits {
            assert_eq!(read_pairs(path).len(), 1);
        }
    }

    #[test]
    fn zero_sizes_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let bad = make_synthetic(
            &SynthConfig {
                seed: 0,
                n_train: 0,
                n_test: 5,
            },
            dir.path(),
        );
        assert!(matches!(bad, Err(SynthError::BadConfig(_))));
        assert!(matches!(
            make_loop_corpus(0, 0, &dir.path().join("x.jsonl")),
            Err(SynthError::BadConfig(_))
        ));
    }

    /// The single lexicon noun in a template sentence.
    fn lexicon_noun(lex: &Lexicon, sentence: &str) -> String {
        let nouns: Vec<String> = tokenize(sentence)
            .into_iter()
            .filter(|t| lex.is_noun(t))
            .collect();
        assert_eq!(nouns.len(), 1, "expected one lexicon noun in {sentence:?}");
        nouns.into_iter().next().unwrap()
    }

    #[test]
    fn training_pairs_use_two_labels_and_one_noun_per_sentence() {
        let lex = load_fixture_lexicon();
        let dir = tempfile::tempdir().unwrap();
        let files = make_synthetic(
            &SynthConfig {
                seed: 3,
                n_train: 120,
                n_test: 6,
            },
            dir.path(),
        )
        .unwrap();
        let pairs = read_pairs(&files.train);
        assert_eq!(pairs.len(), 120);
        let mut seen_e = 0usize;
        let mut seen_c = 0usize;
        for pair in &pairs {
            match pair.label {
                Label::Entailment => seen_e += 1,
                Label::Contradiction => seen_c += 1,
                Label::Neutral => panic!("training corpus must not contain neutral pairs"),
            }
            lexicon_noun(&lex, &pair.premise);
            lexicon_noun(&lex, &pair.hypothesis);
        }
        assert!(seen_e > 20 && seen_c > 20, "both labels well represented");
    }

    /// Label implied by substituting along `kind` on `side` of a pair whose
    /// label was `base`, restricted to the transitions the builders use.
    fn implied_label(base: Label, kind: RelationKind, side: Side) -> Label {
        match (kind, side, base) {
            (RelationKind::Synonym, _, b) => b,
            (RelationKind::Hypernym, Side::Premise, Label::Entailment) => Label::Neutral,
            (RelationKind::Hyponym, Side::Hypothesis, Label::Entailment) => Label::Neutral,
            (RelationKind::CoHyponym, _, Label::Entailment) => Label::Contradiction,
            (RelationKind::Antonym, _, Label::Entailment) => Label::Contradiction,
            (RelationKind::CoHyponym, _, Label::Contradiction) => Label::Entailment,
            (RelationKind::Antonym, _, Label::Contradiction) => Label::Entailment,
            other => panic!("unexpected revision transition {other:?}"),
        }
    }

    #[test]
    fn revision_records_satisfy_the_label_oracle() {
        let lex = load_fixture_lexicon();
        let all: Vec<RevisionRecord> = premise_revision_records(11, 60)
            .into_iter()
            .chain(hypothesis_revision_records(12, 60))
            .chain(mixed_revision_records(13, 60))
            .collect();
        for rec in &all {
            // The substitution must be a real relation edge.
            let candidates = lex.candidates(&rec.from, rec.kind);
            assert!(
                candidates.contains(&rec.to),
                "{} -> {} is not a {:?} edge",
                rec.from,
                rec.to,
                rec.kind
            );
            // The revised side swaps from -> to; the other side is verbatim.
            assert_eq!(
                rec.pair.side(rec.side.other()),
                rec.base.side(rec.side.other())
            );
            assert_eq!(lexicon_noun(&lex, rec.base.side(rec.side)), rec.from);
            assert_eq!(lexicon_noun(&lex, rec.pair.side(rec.side)), rec.to);
            // The stored label matches the relation semantics.
            assert_eq!(
                rec.pair.label,
                implied_label(rec.base.label, rec.kind, rec.side)
            );
            // Entailment rows must name two distinct synonyms, never the
            // same word twice.
            if rec.pair.label == Label::Entailment {
                let p = lexicon_noun(&lex, &rec.pair.premise);
                let h = lexicon_noun(&lex, &rec.pair.hypothesis);
                assert_ne!(p, h);
                assert!(lex.candidates(&p, RelationKind::Synonym).contains(&h));
            }
        }
    }

    #[test]
    fn revision_labels_cycle_evenly() {
        let records = mixed_revision_records(5, 60);
        let mut counts = [0usize; 3];
        for (i, rec) in records.iter().enumerate() {
            counts[rec.pair.label.code()] += 1;
            let expect = if i % 2 == 0 {
                Side::Premise
            } else {
                Side::Hypothesis
            };
            assert_eq!(rec.side, expect);
        }
        assert_eq!(counts, [20, 20, 20]);
    }

    #[test]
    fn loop_corpus_covers_all_labels() {
        let lex = load_fixture_lexicon();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("loop.jsonl");
        make_loop_corpus(2, 90, &path).unwrap();
        let pairs = read_pairs(&path);
        assert_eq!(pairs.len(), 90);
        let mut counts = [0usize; 3];
        for pair in &pairs {
            counts[pair.label.code()] += 1;
            lexicon_noun(&lex, &pair.premise);
            lexicon_noun(&lex, &pair.hypothesis);
        }
        assert_eq!(counts, [30, 30, 30]);

        let again = dir.path().join("loop2.jsonl");
        make_loop_corpus(2, 90, &again).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }
}
