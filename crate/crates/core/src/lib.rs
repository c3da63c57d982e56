//! Counterfactual data augmentation and contrastive training for NLI pair
//! classification, small enough to run on a desk machine.
//!
//! The crate covers the full loop: a WordNet-format lexicon with the handful
//! of relations substitution needs, jsonl corpus handling, token-level and
//! sentence-level counterfactual generation, a compact pair encoder trained
//! with hand-written gradients, relation-based and supervised contrastive
//! objectives, and an evaluation harness for original vs. revised test splits.

pub mod augment;
pub mod corpus;
pub mod encoder;
pub mod eval;
pub mod pipeline;
pub mod synth;
pub mod train;
pub mod wordnet;
