//! Two-stage training. Stage one is contrastive: either a set-relational
//! loss that pulls each anchor pair toward its same-label generated pair and
//! pushes it from the other two, or in-batch supervised contrastive loss
//! over labeled pairs. Stage two is cross-entropy fine-tuning on originals
//! plus every generated pair.

use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AugmentedSet, Label, SentencePair};
use crate::encoder::{
    backprop_z, ce_loss, cosine_sim, encode, logsumexp, sgd_step, EncoderError, EncoderParams,
    Vocab,
};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("temperature must be positive")]
    NonPositiveTemperature,
    #[error("set {0} is missing generated members")]
    IncompleteSet(String),
    #[error("no anchor in the batch has a same-label positive")]
    DegenerateBatch,
    #[error("contrastive stage requested but no usable data")]
    NoContrastiveData,
    #[error("cross-entropy stage requested but the train set is empty")]
    EmptyTrainSet,
    #[error("invalid training config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Encoder(#[from] EncoderError),
}

/// Which loss drives the contrastive stage. `none` skips the stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContrastiveMode {
    Rcl,
    Scl,
    None,
}

impl FromStr for ContrastiveMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rcl" => Ok(ContrastiveMode::Rcl),
            "scl" => Ok(ContrastiveMode::Scl),
            "none" => Ok(ContrastiveMode::None),
            other => Err(format!("unknown contrastive mode '{other}'")),
        }
    }
}

impl ContrastiveMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContrastiveMode::Rcl => "rcl",
            ContrastiveMode::Scl => "scl",
            ContrastiveMode::None => "none",
        }
    }
}

/// Schedule and hyperparameters for both stages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContrastiveConfig {
    pub temperature: f64,
    pub cl_epochs: usize,
    pub cl_lr: f64,
    pub ce_epochs: usize,
    pub ce_lr: f64,
    pub batch_size: usize,
    pub mode: ContrastiveMode,
    pub seed: u64,
}

impl Default for ContrastiveConfig {
    fn default() -> Self {
        ContrastiveConfig {
            temperature: 0.1,
            cl_epochs: 10,
            cl_lr: 0.1,
            ce_epochs: 3,
            ce_lr: 0.05,
            batch_size: 32,
            mode: ContrastiveMode::None,
            seed: 0,
        }
    }
}

impl ContrastiveConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.temperature <= 0.0 {
            return Err(TrainError::NonPositiveTemperature);
        }
        if self.cl_lr <= 0.0 || self.ce_lr <= 0.0 {
            return Err(TrainError::BadConfig(
                "learning rates must be positive".to_string(),
            ));
        }
        if self.batch_size == 0 {
            return Err(TrainError::BadConfig(
                "batch size must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Per-epoch losses, a checksum of the final parameters, and the wall clock.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainReport {
    pub mode: ContrastiveMode,
    pub contrastive_losses: Vec<f64>,
    pub cross_entropy_losses: Vec<f64>,
    pub param_checksum: String,
    pub wall_clock_seconds: f64,
}

/// Set-relational contrastive loss for one anchor given its similarities to
/// the three generated pairs, indexed by label code.
pub fn rcl_loss(sims: &[f64; 3], y: Label, temperature: f64) -> Result<f64, TrainError> {
    if temperature <= 0.0 {
        return Err(TrainError::NonPositiveTemperature);
    }
    let scaled = sims.map(|s| s / temperature);
    Ok(logsumexp(&scaled) - scaled[y.code()])
}

/// d cos(u, v) / du and / dv, without the forward clamp.
fn cosine_grad(u: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>), TrainError> {
    let (mut dot, mut nu2, mut nv2) = (0.0, 0.0, 0.0);
    for (x, y) in u.iter().zip(v) {
        dot += x * y;
        nu2 += x * x;
        nv2 += y * y;
    }
    let (nu, nv) = (nu2.sqrt(), nv2.sqrt());
    if nu < 1e-12 || nv < 1e-12 {
        return Err(TrainError::Encoder(EncoderError::ZeroVector));
    }
    let cos = dot / (nu * nv);
    let du = u
        .iter()
        .zip(v)
        .map(|(x, y)| y / (nu * nv) - cos * x / nu2)
        .collect();
    let dv = u
        .iter()
        .zip(v)
        .map(|(x, y)| x / (nu * nv) - cos * y / nv2)
        .collect();
    Ok((du, dv))
}

/// Mean set-relational loss and gradients over a batch of complete sets.
/// The anchor is the base pair; its label selects the positive member.
pub fn rcl_batch_loss(
    params: &EncoderParams,
    vocab: &Vocab,
    sets: &[&AugmentedSet],
    temperature: f64,
) -> Result<(f64, EncoderParams), TrainError> {
    if temperature <= 0.0 {
        return Err(TrainError::NonPositiveTemperature);
    }
    assert!(!sets.is_empty(), "set batch must be non-empty");
    let mut grads = params.zeros_like();
    let mut loss = 0.0;
    let inv_n = 1.0 / sets.len() as f64;
    for set in sets {
        if !set.is_complete() {
            return Err(TrainError::IncompleteSet(set.group_id.clone()));
        }
        let anchor = encode(params, vocab, &set.base)?;
        let members: Vec<_> = Label::ALL
            .iter()
            .map(|l| encode(params, vocab, &set.generated[l]))
            .collect::<Result<_, _>>()?;
        let mut sims = [0.0; 3];
        for (c, m) in members.iter().enumerate() {
            sims[c] = cosine_sim(&anchor.z, &m.z)?;
        }
        let y = set.base.label;
        loss += rcl_loss(&sims, y, temperature)? * inv_n;

        let scaled = sims.map(|s| s / temperature);
        let lse = logsumexp(&scaled);
        let mut dz_anchor = vec![0.0; anchor.z.len()];
        for (c, m) in members.iter().enumerate() {
            let p = (scaled[c] - lse).exp();
            let indicator = if c == y.code() { 1.0 } else { 0.0 };
            let dsim = (p - indicator) / temperature * inv_n;
            let (du, dv) = cosine_grad(&anchor.z, &m.z)?;
            for (a, d) in dz_anchor.iter_mut().zip(&du) {
                *a += dsim * d;
            }
            let dz_member: Vec<f64> = dv.iter().map(|d| dsim * d).collect();
            backprop_z(params, m, &dz_member, &mut grads);
        }
        backprop_z(params, &anchor, &dz_anchor, &mut grads);
    }
    Ok((loss, grads))
}

/// In-batch supervised contrastive loss: each anchor is pulled toward
/// same-label batch members and pushed from the rest. Anchors without a
/// positive are skipped; a batch where none has one is an error.
pub fn scl_batch_loss(
    params: &EncoderParams,
    vocab: &Vocab,
    pairs: &[SentencePair],
    temperature: f64,
) -> Result<(f64, EncoderParams), TrainError> {
    if temperature <= 0.0 {
        return Err(TrainError::NonPositiveTemperature);
    }
    let n = pairs.len();
    if n < 2 {
        return Err(TrainError::DegenerateBatch);
    }
    let embs: Vec<_> = pairs
        .iter()
        .map(|p| encode(params, vocab, p))
        .collect::<Result<_, _>>()?;
    let mut sims = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s = cosine_sim(&embs[i].z, &embs[j].z)?;
            sims[i][j] = s;
            sims[j][i] = s;
        }
    }
    let anchors: Vec<usize> = (0..n)
        .filter(|&i| (0..n).any(|j| j != i && pairs[j].label == pairs[i].label))
        .collect();
    if anchors.is_empty() {
        return Err(TrainError::DegenerateBatch);
    }
    let inv_m = 1.0 / anchors.len() as f64;
    let mut loss = 0.0;
    let mut dsim = vec![vec![0.0; n]; n];
    for &i in &anchors {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let scaled: Vec<f64> = others.iter().map(|&j| sims[i][j] / temperature).collect();
        let lse = logsumexp(&scaled);
        let positives: Vec<usize> = others
            .iter()
            .copied()
            .filter(|&j| pairs[j].label == pairs[i].label)
            .collect();
        let inv_p = 1.0 / positives.len() as f64;
        let mut loss_i = 0.0;
        for &p in &positives {
            loss_i += (lse - sims[i][p] / temperature) * inv_p;
        }
        loss += loss_i * inv_m;
        for (k, &j) in others.iter().enumerate() {
            let soft = (scaled[k] - lse).exp();
            let pos = if pairs[j].label == pairs[i].label {
                inv_p
            } else {
                0.0
            };
            dsim[i][j] += (soft - pos) / temperature * inv_m;
        }
    }
    let mut grads = params.zeros_like();
    let mut dz = vec![vec![0.0; params.dims.proj]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || dsim[i][j] == 0.0 {
                continue;
            }
            let (du, dv) = cosine_grad(&embs[i].z, &embs[j].z)?;
            for (a, d) in dz[i].iter_mut().zip(&du) {
                *a += dsim[i][j] * d;
            }
            for (a, d) in dz[j].iter_mut().zip(&dv) {
                *a += dsim[i][j] * d;
            }
        }
    }
    for (emb, d) in embs.iter().zip(&dz) {
        backprop_z(params, emb, d, &mut grads);
    }
    Ok((loss, grads))
}

fn shuffled_batches(count: usize, batch: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(rng);
    let mut chunks: Vec<Vec<usize>> = order.chunks(batch).map(|c| c.to_vec()).collect();
    // fold a singleton tail into its neighbor so pair-wise losses stay defined
    if chunks.len() > 1 && chunks.last().is_some_and(|c| c.len() == 1) {
        let tail = chunks.pop().unwrap();
        chunks.last_mut().unwrap().extend(tail);
    }
    chunks
}

/// Runs the schedule: contrastive epochs (per `mode`) then cross-entropy
/// epochs over originals plus every generated pair from `sets`. Parameters
/// are updated in place; the report carries per-epoch mean losses.
pub fn train(
    params: &mut EncoderParams,
    vocab: &Vocab,
    originals: &[SentencePair],
    sets: &[AugmentedSet],
    cfg: &ContrastiveConfig,
) -> Result<TrainReport, TrainError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut contrastive_losses = Vec::new();

    match cfg.mode {
        ContrastiveMode::Rcl if cfg.cl_epochs > 0 => {
            let complete: Vec<&AugmentedSet> = sets.iter().filter(|s| s.is_complete()).collect();
            if complete.is_empty() {
                return Err(TrainError::NoContrastiveData);
            }
            for _ in 0..cfg.cl_epochs {
                let mut epoch_loss = 0.0;
                for chunk in shuffled_batches(complete.len(), cfg.batch_size, &mut rng) {
                    let batch: Vec<&AugmentedSet> = chunk.iter().map(|&i| complete[i]).collect();
                    let (loss, grads) = rcl_batch_loss(params, vocab, &batch, cfg.temperature)?;
                    sgd_step(params, &grads, cfg.cl_lr);
                    epoch_loss += loss * batch.len() as f64;
                }
                contrastive_losses.push(epoch_loss / complete.len() as f64);
            }
        }
        ContrastiveMode::Scl if cfg.cl_epochs > 0 => {
            if originals.len() < 2 {
                return Err(TrainError::NoContrastiveData);
            }
            for _ in 0..cfg.cl_epochs {
                let mut epoch_loss = 0.0;
                for chunk in shuffled_batches(originals.len(), cfg.batch_size, &mut rng) {
                    let batch: Vec<SentencePair> =
                        chunk.iter().map(|&i| originals[i].clone()).collect();
                    let (loss, grads) = scl_batch_loss(params, vocab, &batch, cfg.temperature)?;
                    sgd_step(params, &grads, cfg.cl_lr);
                    epoch_loss += loss * batch.len() as f64;
                }
                contrastive_losses.push(epoch_loss / originals.len() as f64);
            }
        }
        _ => {}
    }

    let mut cross_entropy_losses = Vec::new();
    if cfg.ce_epochs > 0 {
        let mut ce_set: Vec<SentencePair> = originals.to_vec();
        for set in sets {
            ce_set.extend(set.generated.values().cloned());
        }
        if ce_set.is_empty() {
            return Err(TrainError::EmptyTrainSet);
        }
        for _ in 0..cfg.ce_epochs {
            let mut epoch_loss = 0.0;
            for chunk in shuffled_batches(ce_set.len(), cfg.batch_size, &mut rng) {
                let batch: Vec<SentencePair> = chunk.iter().map(|&i| ce_set[i].clone()).collect();
                let (loss, grads) = ce_loss(params, vocab, &batch)?;
                sgd_step(params, &grads, cfg.ce_lr);
                epoch_loss += loss * batch.len() as f64;
            }
            cross_entropy_losses.push(epoch_loss / ce_set.len() as f64);
        }
    }

    Ok(TrainReport {
        mode: cfg.mode,
        contrastive_losses,
        cross_entropy_losses,
        param_checksum: format!("{:016x}", params.checksum()),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}
