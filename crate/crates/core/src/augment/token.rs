//! Token-level counterfactual augmentation: copy one sentence of a pair,
//! then substitute a noun under the relation that steers the copy toward
//! each target class.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{is_stopword, make_base, relation_kinds, substitute, weighted_choice, SidePolicy};
use crate::corpus::{
    tokenize, AugmentedSet, FrequencyTable, Label, Method, Provenance, SentencePair, Side,
};
use crate::wordnet::Lexicon;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct TokenAugmentConfig {
    pub seed: u64,
    pub side: SidePolicy,
    /// Additive smoothing for frequency-weighted candidate sampling. The
    /// default keeps unseen candidates reachable.
    pub smoothing: u64,
}

impl Default for TokenAugmentConfig {
    fn default() -> Self {
        TokenAugmentConfig {
            seed: 0,
            side: SidePolicy::Alternate,
            smoothing: 1,
        }
    }
}

/// One augmented set plus a flag for sentences without any lexicon noun.
pub struct TokenOutcome {
    pub set: AugmentedSet,
    pub no_nouns: bool,
}

/// Result of augmenting a whole corpus.
pub struct TokenAugmentRun {
    pub sets: Vec<AugmentedSet>,
    /// Groups whose sentence had no substitutable noun at all.
    pub no_noun_groups: Vec<String>,
}

/// Augments every pair, deriving the side from the policy and a per-group
/// RNG stream from `cfg.seed` plus the group index, so groups could be
/// processed in any order without changing the output.
pub fn augment_corpus(
    pairs: &[SentencePair],
    lexicon: &Lexicon,
    freq: &FrequencyTable,
    cfg: &TokenAugmentConfig,
) -> TokenAugmentRun {
    let mut sets = Vec::with_capacity(pairs.len());
    let mut no_noun_groups = Vec::new();
    for (i, pair) in pairs.iter().enumerate() {
        let group_id = format!("tok-{i:06}");
        let side = cfg.side.resolve(i);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
        let outcome = augment_token(
            pair,
            &group_id,
            side,
            lexicon,
            freq,
            cfg.smoothing,
            &mut rng,
        );
        if outcome.no_nouns {
            no_noun_groups.push(group_id);
        }
        sets.push(outcome.set);
    }
    TokenAugmentRun {
        sets,
        no_noun_groups,
    }
}

/// Builds one augmented set from a pair. The base copies the to-be-revised
/// sentence into both slots; for each target class one noun is substituted
/// under the relation table, sampling candidates by smoothed corpus
/// frequency. Classes whose nouns all lack candidates are omitted.
pub fn augment_token(
    pair: &SentencePair,
    group_id: &str,
    side: Side,
    lexicon: &Lexicon,
    freq: &FrequencyTable,
    smoothing: u64,
    rng: &mut ChaCha8Rng,
) -> TokenOutcome {
    let base = make_base(pair, side);
    let sentence = base.side(side).to_string();
    let mut set = AugmentedSet::new(group_id, base);

    // Distinct substitutable nouns in first-appearance order.
    let mut nouns: Vec<String> = Vec::new();
    for token in tokenize(&sentence) {
        if lexicon.is_noun(&token) && !is_stopword(&token) && !nouns.contains(&token) {
            nouns.push(token);
        }
    }
    if nouns.is_empty() {
        return TokenOutcome {
            set,
            no_nouns: true,
        };
    }

    for target in Label::ALL {
        // First element of the shuffle is the uniform pick; the rest is the
        // retry order over the remaining nouns, without replacement.
        let mut order = nouns.clone();
        order.shuffle(rng);
        for noun in &order {
            let mut pool: Vec<String> = Vec::new();
            for kind in relation_kinds(target, side) {
                for candidate in lexicon.candidates(noun, *kind) {
                    if !pool.contains(&candidate) {
                        pool.push(candidate);
                    }
                }
            }
            let weights: Vec<u64> = pool.iter().map(|c| freq.count(c) + smoothing).collect();
            let Some(pick) = weighted_choice(rng, &weights) else {
                continue;
            };
            let revised = substitute(&sentence, noun, &pool[pick]);
            let generated = match side {
                Side::Premise => SentencePair::new(revised, set.base.hypothesis.clone(), target),
                Side::Hypothesis => SentencePair::new(set.base.premise.clone(), revised, target),
            };
            set.insert(
                target,
                generated,
                Provenance {
                    method: Method::Token,
                    revised_side: side,
                    substituted: Some((noun.clone(), pool[pick].clone())),
                    confidence: None,
                },
            );
            break;
        }
    }

    TokenOutcome {
        set,
        no_nouns: false,
    }
}
