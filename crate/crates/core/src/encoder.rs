//! Compact pair encoder trained from scratch: mean-pooled token embeddings,
//! one tanh layer, a linear projection for contrastive space, and a linear
//! 3-class head. Gradients are written by hand; finite-difference tests keep
//! them honest.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{tokenize, Label, SentencePair};

/// Reserved vocabulary indices. Index 0 stays unused by the mean-pooling
/// forward pass but is reserved so batched variants could pad.
pub const PAD: usize = 0;
pub const SEP: usize = 1;
pub const UNK: usize = 2;

const RESERVED: [&str; 3] = ["<pad>", "<sep>", "<unk>"];

#[derive(Debug, Error)]
pub enum EncoderError {
    #[error("pair tokenizes to nothing on both sides")]
    EmptyPair,
    #[error("cosine similarity over a zero vector")]
    ZeroVector,
    #[error("checkpoint rejected: {0}")]
    BadCheckpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("checkpoint is not valid json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Token-to-index map built from a corpus, with three reserved slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    /// Collects tokens in first-appearance order, premise before hypothesis.
    pub fn build(pairs: &[SentencePair]) -> Vocab {
        let mut vocab = Vocab::from_tokens(Vec::new());
        for pair in pairs {
            for sentence in [&pair.premise, &pair.hypothesis] {
                for token in tokenize(sentence) {
                    if !vocab.index.contains_key(&token) {
                        vocab.index.insert(token.clone(), vocab.tokens.len());
                        vocab.tokens.push(token);
                    }
                }
            }
        }
        vocab
    }

    /// Rebuilds a vocabulary from its non-reserved token list.
    pub fn from_tokens(tokens: Vec<String>) -> Vocab {
        let mut all: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        all.extend(tokens);
        let index = all
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocab { tokens: all, index }
    }

    /// Index of a token; unknown tokens map to [`UNK`].
    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(UNK)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Never true: the reserved tokens are always present.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Tokens after the reserved prefix, the checkpoint payload.
    pub fn corpus_tokens(&self) -> &[String] {
        &self.tokens[RESERVED.len()..]
    }
}

/// Layer widths: embedding, hidden, and contrastive projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderDims {
    pub embed: usize,
    pub hidden: usize,
    pub proj: usize,
}

impl Default for EncoderDims {
    fn default() -> Self {
        EncoderDims {
            embed: 64,
            hidden: 64,
            proj: 32,
        }
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] += v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// All trainable parameters. The same struct doubles as the gradient
/// container, so SGD walks both in lockstep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderParams {
    pub dims: EncoderDims,
    /// Token embeddings, vocab size x embed.
    pub emb: Mat,
    /// Pooled-to-hidden weights, embed x hidden.
    pub w1: Mat,
    pub b1: Vec<f64>,
    /// Hidden-to-projection weights, hidden x proj.
    pub w2: Mat,
    pub b2: Vec<f64>,
    /// Projection-to-logits weights, proj x 3.
    pub wc: Mat,
    pub bc: Vec<f64>,
}

impl EncoderParams {
    /// Fresh parameters: weights uniform in (-0.1, 0.1) drawn in a fixed
    /// field order from the seed, biases zero.
    pub fn init(vocab_len: usize, dims: EncoderDims, seed: u64) -> EncoderParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fill = |rows: usize, cols: usize, rng: &mut ChaCha8Rng| -> Mat {
            let data = (0..rows * cols)
                .map(|_| rng.random_range(-0.1..0.1))
                .collect();
            Mat { rows, cols, data }
        };
        EncoderParams {
            dims,
            emb: fill(vocab_len, dims.embed, &mut rng),
            w1: fill(dims.embed, dims.hidden, &mut rng),
            b1: vec![0.0; dims.hidden],
            w2: fill(dims.hidden, dims.proj, &mut rng),
            b2: vec![0.0; dims.proj],
            wc: fill(dims.proj, 3, &mut rng),
            bc: vec![0.0; 3],
        }
    }

    /// All-zero parameters with the same shape, the gradient container.
    pub fn zeros_like(&self) -> EncoderParams {
        EncoderParams {
            dims: self.dims,
            emb: Mat::zeros(self.emb.rows, self.emb.cols),
            w1: Mat::zeros(self.w1.rows, self.w1.cols),
            b1: vec![0.0; self.b1.len()],
            w2: Mat::zeros(self.w2.rows, self.w2.cols),
            b2: vec![0.0; self.b2.len()],
            wc: Mat::zeros(self.wc.rows, self.wc.cols),
            bc: vec![0.0; self.bc.len()],
        }
    }

    fn views(&self) -> [&[f64]; 7] {
        [
            &self.emb.data,
            &self.w1.data,
            &self.b1,
            &self.w2.data,
            &self.b2,
            &self.wc.data,
            &self.bc,
        ]
    }

    fn views_mut(&mut self) -> [&mut [f64]; 7] {
        [
            &mut self.emb.data,
            &mut self.w1.data,
            &mut self.b1,
            &mut self.w2.data,
            &mut self.b2,
            &mut self.wc.data,
            &mut self.bc,
        ]
    }

    /// Total number of scalar coordinates.
    pub fn coord_count(&self) -> usize {
        self.views().iter().map(|v| v.len()).sum()
    }

    pub fn coord(&self, mut i: usize) -> f64 {
        for view in self.views() {
            if i < view.len() {
                return view[i];
            }
            i -= view.len();
        }
        panic!("coordinate index out of range");
    }

    /// Mutable access by flat coordinate, for finite-difference probing.
    pub fn coord_mut(&mut self, mut i: usize) -> &mut f64 {
        for view in self.views_mut() {
            if i < view.len() {
                return &mut view[i];
            }
            i -= view.len();
        }
        panic!("coordinate index out of range");
    }

    /// FNV-1a over the exact bit patterns of every coordinate; equal
    /// checksums on the same platform mean bit-identical parameters.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for view in self.views() {
            for v in view.iter() {
                for byte in v.to_bits().to_le_bytes() {
                    h ^= u64::from(byte);
                    h = h.wrapping_mul(0x0000_0100_0000_01b3);
                }
            }
        }
        h
    }
}

/// In-place SGD: `p -= lr * g` for every coordinate.
pub fn sgd_step(params: &mut EncoderParams, grads: &EncoderParams, lr: f64) {
    for (p, g) in params.views_mut().into_iter().zip(grads.views()) {
        for (pv, gv) in p.iter_mut().zip(g.iter()) {
            *pv -= lr * gv;
        }
    }
}

/// Forward-pass cache for one pair: token ids and every intermediate needed
/// to run the backward pass.
#[derive(Clone, Debug)]
pub struct PairEmbedding {
    pub token_ids: Vec<usize>,
    pub pooled: Vec<f64>,
    pub hidden: Vec<f64>,
    /// Contrastive-space projection.
    pub z: Vec<f64>,
}

fn affine(x: &[f64], w: &Mat, b: &[f64]) -> Vec<f64> {
    let mut out = b.to_vec();
    for (i, xi) in x.iter().enumerate() {
        let row = w.row(i);
        for (o, wij) in out.iter_mut().zip(row) {
            *o += xi * wij;
        }
    }
    out
}

/// Embeds a pair: premise tokens, a separator, hypothesis tokens; mean-pools
/// the embeddings; applies tanh hidden layer and linear projection.
pub fn encode(
    params: &EncoderParams,
    vocab: &Vocab,
    pair: &SentencePair,
) -> Result<PairEmbedding, EncoderError> {
    let premise = tokenize(&pair.premise);
    let hypothesis = tokenize(&pair.hypothesis);
    if premise.is_empty() && hypothesis.is_empty() {
        return Err(EncoderError::EmptyPair);
    }
    let mut token_ids: Vec<usize> = Vec::with_capacity(premise.len() + hypothesis.len() + 1);
    token_ids.extend(premise.iter().map(|t| vocab.id(t)));
    token_ids.push(SEP);
    token_ids.extend(hypothesis.iter().map(|t| vocab.id(t)));

    let d = params.dims.embed;
    let mut pooled = vec![0.0; d];
    for id in &token_ids {
        for (p, e) in pooled.iter_mut().zip(params.emb.row(*id)) {
            *p += e;
        }
    }
    let inv_n = 1.0 / token_ids.len() as f64;
    for p in pooled.iter_mut() {
        *p *= inv_n;
    }

    let mut hidden = affine(&pooled, &params.w1, &params.b1);
    for h in hidden.iter_mut() {
        *h = h.tanh();
    }
    let z = affine(&hidden, &params.w2, &params.b2);

    Ok(PairEmbedding {
        token_ids,
        pooled,
        hidden,
        z,
    })
}

/// Class logits for an encoded pair.
pub fn classify(params: &EncoderParams, emb: &PairEmbedding) -> [f64; 3] {
    let v = affine(&emb.z, &params.wc, &params.bc);
    [v[0], v[1], v[2]]
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64; 3]) -> [f64; 3] {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps = logits.map(|l| (l - m).exp());
    let sum: f64 = exps.iter().sum();
    exps.map(|e| e / sum)
}

/// log(sum(exp(xs))) with max subtraction.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Cosine similarity clamped to [-1, 1]. Zero vectors are an error.
pub fn cosine_sim(a: &[f64], b: &[f64]) -> Result<f64, EncoderError> {
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    let (na, nb) = (na.sqrt(), nb.sqrt());
    if na < 1e-12 || nb < 1e-12 {
        return Err(EncoderError::ZeroVector);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Backpropagates dL/dz through projection, hidden layer, pooling, and
/// embeddings, accumulating into `grads`.
pub fn backprop_z(
    params: &EncoderParams,
    cache: &PairEmbedding,
    dz: &[f64],
    grads: &mut EncoderParams,
) {
    // projection: z = hidden . w2 + b2
    for (g, d) in grads.b2.iter_mut().zip(dz) {
        *g += d;
    }
    let mut dhidden = vec![0.0; params.dims.hidden];
    for (i, h) in cache.hidden.iter().enumerate() {
        let wrow = params.w2.row(i);
        let mut acc = 0.0;
        for (j, d) in dz.iter().enumerate() {
            grads.w2.add(i, j, h * d);
            acc += wrow[j] * d;
        }
        dhidden[i] = acc;
    }
    // hidden = tanh(pre1); d pre1 = d hidden * (1 - hidden^2)
    let dpre1: Vec<f64> = dhidden
        .iter()
        .zip(&cache.hidden)
        .map(|(d, h)| d * (1.0 - h * h))
        .collect();
    for (g, d) in grads.b1.iter_mut().zip(&dpre1) {
        *g += d;
    }
    let mut dpooled = vec![0.0; params.dims.embed];
    for (i, p) in cache.pooled.iter().enumerate() {
        let wrow = params.w1.row(i);
        let mut acc = 0.0;
        for (j, d) in dpre1.iter().enumerate() {
            grads.w1.add(i, j, p * d);
            acc += wrow[j] * d;
        }
        dpooled[i] = acc;
    }
    // pooled = mean of token embeddings
    let inv_n = 1.0 / cache.token_ids.len() as f64;
    for id in &cache.token_ids {
        for (j, d) in dpooled.iter().enumerate() {
            grads.emb.add(*id, j, d * inv_n);
        }
    }
}

/// Mean cross-entropy loss and gradients over a batch of labeled pairs.
pub fn ce_loss(
    params: &EncoderParams,
    vocab: &Vocab,
    pairs: &[SentencePair],
) -> Result<(f64, EncoderParams), EncoderError> {
    assert!(!pairs.is_empty(), "cross-entropy batch must be non-empty");
    let mut grads = params.zeros_like();
    let mut loss = 0.0;
    let inv_n = 1.0 / pairs.len() as f64;
    for pair in pairs {
        let emb = encode(params, vocab, pair)?;
        let logits = classify(params, &emb);
        let y = pair.label.code();
        loss += (logsumexp(&logits) - logits[y]) * inv_n;

        let probs = softmax(&logits);
        let mut dlogits = probs;
        dlogits[y] -= 1.0;
        for d in dlogits.iter_mut() {
            *d *= inv_n;
        }
        for (g, d) in grads.bc.iter_mut().zip(&dlogits) {
            *g += d;
        }
        let mut dz = vec![0.0; params.dims.proj];
        for (i, zi) in emb.z.iter().enumerate() {
            let wrow = params.wc.row(i);
            let mut acc = 0.0;
            for (j, d) in dlogits.iter().enumerate() {
                grads.wc.add(i, j, zi * d);
                acc += wrow[j] * d;
            }
            dz[i] = acc;
        }
        backprop_z(params, &emb, &dz, &mut grads);
    }
    Ok((loss, grads))
}

/// Softmax probability the classifier assigns to `target`.
pub fn confidence(
    params: &EncoderParams,
    vocab: &Vocab,
    pair: &SentencePair,
    target: Label,
) -> Result<f64, EncoderError> {
    let emb = encode(params, vocab, pair)?;
    let probs = softmax(&classify(params, &emb));
    Ok(probs[target.code()])
}

/// Argmax prediction; ties resolve to the lowest class index.
pub fn predict(
    params: &EncoderParams,
    vocab: &Vocab,
    pair: &SentencePair,
) -> Result<Label, EncoderError> {
    let emb = encode(params, vocab, pair)?;
    let logits = classify(params, &emb);
    let mut best = 0;
    for (i, l) in logits.iter().enumerate().skip(1) {
        if *l > logits[best] {
            best = i;
        }
    }
    Ok(Label::from_code(best).expect("three classes"))
}

/// Versioned checkpoint: vocabulary plus parameters, stored as json whose
/// float encoding round-trips f64 bits exactly.
#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    vocab: Vec<String>,
    params: EncoderParams,
}

pub fn save_checkpoint(
    path: &Path,
    vocab: &Vocab,
    params: &EncoderParams,
) -> Result<(), EncoderError> {
    let ckpt = Checkpoint {
        version: 1,
        vocab: vocab.corpus_tokens().to_vec(),
        params: params.clone(),
    };
    let body = serde_json::to_string(&ckpt)?;
    fs::write(path, body)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(Vocab, EncoderParams), EncoderError> {
    let body = fs::read_to_string(path)?;
    let ckpt: Checkpoint = serde_json::from_str(&body)?;
    if ckpt.version != 1 {
        return Err(EncoderError::BadCheckpoint(format!(
            "unsupported version {}",
            ckpt.version
        )));
    }
    let vocab = Vocab::from_tokens(ckpt.vocab);
    let p = &ckpt.params;
    let shape_ok = p.emb.rows == vocab.len()
        && p.emb.cols == p.dims.embed
        && p.emb.data.len() == p.emb.rows * p.emb.cols
        && p.w1.rows == p.dims.embed
        && p.w1.cols == p.dims.hidden
        && p.w1.data.len() == p.w1.rows * p.w1.cols
        && p.b1.len() == p.dims.hidden
        && p.w2.rows == p.dims.hidden
        && p.w2.cols == p.dims.proj
        && p.w2.data.len() == p.w2.rows * p.w2.cols
        && p.b2.len() == p.dims.proj
        && p.wc.rows == p.dims.proj
        && p.wc.cols == 3
        && p.wc.data.len() == p.wc.rows * p.wc.cols
        && p.bc.len() == 3;
    if !shape_ok {
        return Err(EncoderError::BadCheckpoint(
            "parameter shapes disagree with header".to_string(),
        ));
    }
    if p.views().iter().any(|v| v.iter().any(|x| !x.is_finite())) {
        return Err(EncoderError::BadCheckpoint(
            "non-finite parameter value".to_string(),
        ));
    }
    Ok((vocab, ckpt.params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params(vocab_len: usize) -> EncoderParams {
        let dims = EncoderDims {
            embed: 4,
            hidden: 3,
            proj: 2,
        };
        EncoderParams::init(vocab_len, dims, 11)
    }

    #[test]
    fn vocab_reserves_three_slots() {
        let vocab = Vocab::build(&[]);
        assert_eq!(vocab.len(), 3);
        assert_eq!(vocab.tokens(), &["<pad>", "<sep>", "<unk>"]);
        assert_eq!(vocab.id("anything"), UNK);
        assert_eq!(PAD, 0);
        assert_eq!(SEP, 1);
    }

    #[test]
    fn vocab_orders_by_first_appearance() {
        let pairs = vec![SentencePair::new("b a", "a c", Label::Neutral)];
        let vocab = Vocab::build(&pairs);
        assert_eq!(vocab.corpus_tokens(), &["b", "a", "c"]);
        assert_eq!(vocab.id("b"), 3);
        assert_eq!(vocab.id("c"), 5);
    }

    #[test]
    fn pooled_is_mean_including_separator() {
        let pairs = vec![SentencePair::new("dog", "dog", Label::Entailment)];
        let vocab = Vocab::build(&pairs);
        let params = small_params(vocab.len());
        let emb = encode(&params, &vocab, &pairs[0]).unwrap();
        let t = vocab.id("dog");
        // independent arithmetic: (2*emb[dog] + emb[sep]) / 3
        for j in 0..params.dims.embed {
            let expect = (2.0 * params.emb.get(t, j) + params.emb.get(SEP, j)) / 3.0;
            assert!((emb.pooled[j] - expect).abs() < 1e-15);
        }
        assert_eq!(emb.token_ids, vec![t, SEP, t]);
    }

    #[test]
    fn pooling_ignores_token_order_within_a_side() {
        let a = SentencePair::new("red dog runs", "x", Label::Neutral);
        let b = SentencePair::new("runs red dog", "x", Label::Neutral);
        let vocab = Vocab::build(std::slice::from_ref(&a));
        let params = small_params(vocab.len());
        let ea = encode(&params, &vocab, &a).unwrap();
        let eb = encode(&params, &vocab, &b).unwrap();
        for (x, y) in ea.pooled.iter().zip(&eb.pooled) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_pair_is_rejected() {
        let vocab = Vocab::build(&[]);
        let params = small_params(vocab.len());
        let pair = SentencePair::new("...", "!!!", Label::Neutral);
        assert!(matches!(
            encode(&params, &vocab, &pair),
            Err(EncoderError::EmptyPair)
        ));
    }

    #[test]
    fn softmax_sums_to_one_and_matches_frozen_value() {
        let probs = softmax(&[2.0, 0.0, 0.0]);
        let sum: f64 = probs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        // e^2 / (e^2 + 2), computed separately
        assert!((probs[0] - 0.786986).abs() < 1e-5);
        let uniform = softmax(&[0.0, 0.0, 0.0]);
        for p in uniform {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_matches_hand_computation() {
        let c = cosine_sim(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        // 32 / sqrt(14 * 77)
        assert!((c - 0.9746318461970762).abs() < 1e-12);
        assert!(matches!(
            cosine_sim(&[0.0, 0.0], &[1.0, 1.0]),
            Err(EncoderError::ZeroVector)
        ));
        let same = cosine_sim(&[0.3, -0.7], &[0.3, -0.7]).unwrap();
        assert!(same <= 1.0 && same > 1.0 - 1e-12);
    }

    #[test]
    fn init_is_seeded_and_biases_are_zero() {
        let dims = EncoderDims::default();
        let a = EncoderParams::init(10, dims, 42);
        let b = EncoderParams::init(10, dims, 42);
        let c = EncoderParams::init(10, dims, 43);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.b1.iter().all(|v| *v == 0.0));
        assert!(a.bc.iter().all(|v| *v == 0.0));
        assert!(a.emb.data.iter().all(|v| *v > -0.1 && *v < 0.1));
    }

    #[test]
    fn ce_gradient_at_zero_params_is_softmax_minus_onehot() {
        let pairs = vec![SentencePair::new("a b", "c", Label::Neutral)];
        let vocab = Vocab::build(&pairs);
        let dims = EncoderDims {
            embed: 4,
            hidden: 3,
            proj: 2,
        };
        let zero = EncoderParams::init(vocab.len(), dims, 0).zeros_like();
        let (loss, grads) = ce_loss(&zero, &vocab, &pairs).unwrap();
        assert!((loss - 3.0f64.ln()).abs() < 1e-12);
        let expect = [1.0 / 3.0, 1.0 / 3.0 - 1.0, 1.0 / 3.0];
        for (g, e) in grads.bc.iter().zip(expect) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn sgd_moves_against_gradient() {
        let dims = EncoderDims {
            embed: 2,
            hidden: 2,
            proj: 2,
        };
        let mut params = EncoderParams::init(4, dims, 5);
        let before = params.coord(0);
        let mut grads = params.zeros_like();
        *grads.coord_mut(0) = 2.0;
        sgd_step(&mut params, &grads, 0.5);
        assert!((params.coord(0) - (before - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn checkpoint_round_trips_bit_exactly() {
        let pairs = vec![SentencePair::new(
            "a dog runs",
            "a cat sits",
            Label::Neutral,
        )];
        let vocab = Vocab::build(&pairs);
        let params = small_params(vocab.len());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&path, &vocab, &params).unwrap();
        let (v2, p2) = load_checkpoint(&path).unwrap();
        assert_eq!(v2, vocab);
        assert_eq!(p2, params);
        assert_eq!(p2.checksum(), params.checksum());
    }

    #[test]
    fn checkpoint_shape_mismatch_is_rejected() {
        let pairs = vec![SentencePair::new("a", "b", Label::Neutral)];
        let vocab = Vocab::build(&pairs);
        let mut params = small_params(vocab.len());
        params.b1.push(0.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&path, &vocab, &params).unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(EncoderError::BadCheckpoint(_))
        ));
    }

    #[test]
    fn prediction_breaks_ties_toward_lowest_index() {
        let pairs = vec![SentencePair::new("a", "b", Label::Contradiction)];
        let vocab = Vocab::build(&pairs);
        let params = small_params(vocab.len()).zeros_like();
        // all logits zero: tie resolves to class 0
        assert_eq!(
            predict(&params, &vocab, &pairs[0]).unwrap(),
            Label::Entailment
        );
    }
}
