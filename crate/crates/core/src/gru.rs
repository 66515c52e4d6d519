//! Single-layer GRU text classifier trained with BPTT and Adam.
//!
//! Cell (Cho et al.):
//!
//! ```text
//! z  = sigmoid(W_z x + U_z h + b_z)
//! r  = sigmoid(W_r x + U_r h + b_r)
//! h~ = tanh(W_h x + U_h (r * h) + b_h)
//! h' = (1 - z) * h + z * h~
//! ```
//!
//! A document is embedded token by token, PAD positions are skipped, the
//! final state goes through inverted dropout (training only) and an affine
//! head produces one logit per class. All parameters live in one flat
//! vector; [`Block`] names the slices.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{argmax, class_weights, sigmoid, softmax};
use crate::metrics::weighted_f1;
use crate::seeds::{child_seed, rng, Stream};
use crate::{ClassWeightMode, LabelId};

pub const PAD: usize = 0;
pub const OOV: usize = 1;
/// Longest accepted sequence length.
pub const MAX_SEQ_LEN: usize = 1 << 16;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeqVocabulary {
    /// Index to token; entries 0 and 1 are the PAD and OOV placeholders.
    pub tokens: Vec<String>,
    pub max_len: usize,
    pub min_freq: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl PartialEq for SeqVocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens && self.max_len == other.max_len && self.min_freq == other.min_freq
    }
}

impl SeqVocabulary {
    /// Tokens seen at least `min_freq` times, in lexicographic order after
    /// the two reserved entries.
    pub fn build<D: AsRef<[String]>>(docs: &[D], min_freq: usize, max_len: usize) -> SeqVocabulary {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for d in docs {
            for t in d.as_ref() {
                *counts.entry(t.as_str()).or_default() += 1;
            }
        }
        let mut tokens = vec!["<pad>".to_string(), "<oov>".to_string()];
        tokens.extend(counts.into_iter().filter(|&(_, c)| c >= min_freq.max(1)).map(|(t, _)| t.to_string()));
        Self::from_tokens(tokens, max_len, min_freq).expect("built vocabulary is valid")
    }

    pub fn from_tokens(tokens: Vec<String>, max_len: usize, min_freq: usize) -> Result<SeqVocabulary> {
        if tokens.len() < 2 || max_len == 0 || max_len > MAX_SEQ_LEN {
            return Err(Error::InvalidModel(format!(
                "sequence vocabulary needs PAD, OOV and 1 <= max_len <= {MAX_SEQ_LEN}"
            )));
        }
        let index: HashMap<String, usize> = tokens.iter().enumerate().skip(2).map(|(i, t)| (t.clone(), i)).collect();
        if index.len() != tokens.len() - 2 {
            return Err(Error::InvalidModel("duplicate token in sequence vocabulary".into()));
        }
        Ok(SeqVocabulary {
            tokens,
            max_len,
            min_freq,
            index,
        })
    }

    /// Rebuilds the lookup table after deserialization, rejecting
    /// malformed tables.
    pub fn reindex(self) -> Result<SeqVocabulary> {
        Self::from_tokens(self.tokens, self.max_len, self.min_freq)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Indices of the first `max_len` tokens, OOV for unknown ones, padded
    /// on the right with PAD.
    pub fn encode(&self, doc: &[String]) -> Vec<usize> {
        let mut out: Vec<usize> = doc
            .iter()
            .take(self.max_len)
            .map(|t| self.index.get(t).copied().unwrap_or(OOV))
            .collect();
        out.resize(self.max_len, PAD);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Embedding,
    Wz,
    Uz,
    Bz,
    Wr,
    Ur,
    Br,
    Wh,
    Uh,
    Bh,
    Wo,
    Bo,
}

const BLOCKS: [Block; 12] = [
    Block::Embedding,
    Block::Wz,
    Block::Uz,
    Block::Bz,
    Block::Wr,
    Block::Ur,
    Block::Br,
    Block::Wh,
    Block::Uh,
    Block::Bh,
    Block::Wo,
    Block::Bo,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GruDims {
    pub vocab_size: usize,
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub n_classes: usize,
}

impl GruDims {
    fn block_len(&self, b: Block) -> usize {
        let (v, e, h, k) = (self.vocab_size, self.embedding_dim, self.hidden_dim, self.n_classes);
        match b {
            Block::Embedding => v * e,
            Block::Wz | Block::Wr | Block::Wh => h * e,
            Block::Uz | Block::Ur | Block::Uh => h * h,
            Block::Bz | Block::Br | Block::Bh => h,
            Block::Wo => k * h,
            Block::Bo => k,
        }
    }

    pub fn range(&self, b: Block) -> std::ops::Range<usize> {
        let mut start = 0;
        for blk in BLOCKS {
            let len = self.block_len(blk);
            if blk == b {
                return start..start + len;
            }
            start += len;
        }
        unreachable!()
    }

    pub fn n_params(&self) -> usize {
        BLOCKS.iter().map(|&b| self.block_len(b)).sum()
    }

    /// `n_params` without overflow, for dimensions read from untrusted input.
    pub fn checked_n_params(&self) -> Option<usize> {
        let (v, e, h, k) = (self.vocab_size, self.embedding_dim, self.hidden_dim, self.n_classes);
        let he = h.checked_mul(e)?;
        let hh = h.checked_mul(h)?;
        [v.checked_mul(e)?, he, he, he, hh, hh, hh, h, h, h, k.checked_mul(h)?, k]
            .into_iter()
            .try_fold(0usize, |acc, x| acc.checked_add(x))
    }
}

/// Parameters in one flat vector, laid out in [`Block`] order; matrices are
/// row-major with the output dimension first (`W_z` is `H x E`, the
/// embedding is `V x E`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GruParams {
    pub dims: GruDims,
    pub dropout: f64,
    pub data: Vec<f64>,
}

impl GruParams {
    pub fn zeros(dims: GruDims, dropout: f64) -> GruParams {
        GruParams {
            dims,
            dropout,
            data: vec![0.0; dims.n_params()],
        }
    }

    /// Uniform(-0.08, 0.08) initialization.
    pub fn init(dims: GruDims, dropout: f64, rng: &mut ChaCha8Rng) -> GruParams {
        let data = (0..dims.n_params()).map(|_| rng.gen_range(-0.08..0.08)).collect();
        GruParams { dims, dropout, data }
    }

    pub fn block(&self, b: Block) -> &[f64] {
        &self.data[self.dims.range(b)]
    }

    pub fn block_mut(&mut self, b: Block) -> &mut [f64] {
        let r = self.dims.range(b);
        &mut self.data[r]
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.dims;
        if d.vocab_size < 2 || d.embedding_dim == 0 || d.hidden_dim == 0 || d.n_classes < 2 {
            return Err(Error::InvalidModel("gru: dimensions".into()));
        }
        if d.checked_n_params() != Some(self.data.len()) {
            return Err(Error::InvalidModel("gru: parameter count".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) || self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("gru: non-finite parameters or dropout".into()));
        }
        Ok(())
    }
}

/// `out += W v` for row-major `W` with `out.len()` rows.
#[inline]
fn matvec_add(out: &mut [f64], w: &[f64], v: &[f64]) {
    let cols = v.len();
    for (o, row) in out.iter_mut().zip(w.chunks_exact(cols)) {
        *o += row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// `out += W^T u`.
#[inline]
fn matvec_t_add(out: &mut [f64], w: &[f64], u: &[f64]) {
    let cols = out.len();
    for (&ui, row) in u.iter().zip(w.chunks_exact(cols)) {
        if ui != 0.0 {
            for (o, a) in out.iter_mut().zip(row) {
                *o += ui * a;
            }
        }
    }
}

/// `G += u v^T`.
#[inline]
fn outer_add(g: &mut [f64], u: &[f64], v: &[f64]) {
    let cols = v.len();
    for (&ui, row) in u.iter().zip(g.chunks_exact_mut(cols)) {
        if ui != 0.0 {
            for (o, b) in row.iter_mut().zip(v) {
                *o += ui * b;
            }
        }
    }
}

/// Intermediate values of one cell step.
#[derive(Debug, Clone)]
pub struct CellState {
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub candidate: Vec<f64>,
    pub h: Vec<f64>,
}

pub fn gru_cell(x: &[f64], h_prev: &[f64], p: &GruParams) -> CellState {
    let hd = p.dims.hidden_dim;
    let gate = |w: Block, u: Block, b: Block, hv: &[f64]| {
        let mut a = p.block(b).to_vec();
        matvec_add(&mut a, p.block(w), x);
        matvec_add(&mut a, p.block(u), hv);
        a
    };
    let z: Vec<f64> = gate(Block::Wz, Block::Uz, Block::Bz, h_prev).into_iter().map(sigmoid).collect();
    let r: Vec<f64> = gate(Block::Wr, Block::Ur, Block::Br, h_prev).into_iter().map(sigmoid).collect();
    let rh: Vec<f64> = r.iter().zip(h_prev).map(|(a, b)| a * b).collect();
    let candidate: Vec<f64> = gate(Block::Wh, Block::Uh, Block::Bh, &rh).into_iter().map(f64::tanh).collect();
    let h = (0..hd).map(|j| (1.0 - z[j]) * h_prev[j] + z[j] * candidate[j]).collect();
    CellState { z, r, candidate, h }
}

fn embedding<'a>(p: &'a GruParams, token: usize) -> &'a [f64] {
    let e = p.dims.embedding_dim;
    &p.block(Block::Embedding)[token * e..(token + 1) * e]
}

fn check_tokens(seq: &[usize], vocab_size: usize) -> Result<()> {
    match seq.iter().find(|&&t| t >= vocab_size) {
        Some(&index) => Err(Error::IndexOutOfVocabulary { index, vocab_size }),
        None => Ok(()),
    }
}

/// Final hidden state after running the cell over the non-PAD positions.
pub fn final_state(seq: &[usize], p: &GruParams) -> Result<Vec<f64>> {
    check_tokens(seq, p.dims.vocab_size)?;
    let mut h = vec![0.0; p.dims.hidden_dim];
    for &t in seq.iter().filter(|&&t| t != PAD) {
        h = gru_cell(embedding(p, t), &h, p).h;
    }
    Ok(h)
}

fn head(p: &GruParams, h: &[f64]) -> Vec<f64> {
    let mut logits = p.block(Block::Bo).to_vec();
    matvec_add(&mut logits, p.block(Block::Wo), h);
    logits
}

/// Class logits. With `dropout_mask = Some(m)` (training) the final state is
/// multiplied elementwise by `m`, whose entries are 0 or `1 / (1 - rate)`.
pub fn forward(seq: &[usize], p: &GruParams, dropout_mask: Option<&[f64]>) -> Result<Vec<f64>> {
    let mut h = final_state(seq, p)?;
    if let Some(m) = dropout_mask {
        h.iter_mut().zip(m).for_each(|(a, b)| *a *= b);
    }
    Ok(head(p, &h))
}

pub fn predict_proba(seq: &[usize], p: &GruParams) -> Result<Vec<f64>> {
    Ok(softmax(&forward(seq, p, None)?))
}

/// Inverted-dropout mask for the final state.
pub fn dropout_mask(hidden: usize, rate: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if rate <= 0.0 {
        return vec![1.0; hidden];
    }
    let keep = 1.0 / (1.0 - rate);
    (0..hidden).map(|_| if rng.gen::<f64>() < rate { 0.0 } else { keep }).collect()
}

/// `(1/B) sum_i w_{y_i} CE_i` and its exact gradient (same layout as
/// `params.data`) through BPTT. `masks[i]` is sample `i`'s frozen dropout
/// mask; `None` means no dropout.
pub fn loss_gradients(
    p: &GruParams,
    batch: &[(&[usize], LabelId)],
    class_weights: &[f64],
    masks: Option<&[Vec<f64>]>,
) -> Result<(f64, Vec<f64>)> {
    let mut grad = vec![0.0; p.data.len()];
    let loss = accumulate_gradients(p, batch, class_weights, masks, &mut grad)?;
    Ok((loss, grad))
}

fn accumulate_gradients(
    p: &GruParams,
    batch: &[(&[usize], LabelId)],
    class_weights: &[f64],
    masks: Option<&[Vec<f64>]>,
    grad: &mut [f64],
) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let d = p.dims;
    let (e, hd, k) = (d.embedding_dim, d.hidden_dim, d.n_classes);
    let inv_b = 1.0 / batch.len() as f64;
    let r = |b: Block| d.range(b);
    let mut loss = 0.0;
    let mut steps: Vec<(usize, Vec<f64>, CellState)> = Vec::new();
    for (s, &(seq, y)) in batch.iter().enumerate() {
        check_tokens(seq, d.vocab_size)?;
        if y >= k {
            return Err(Error::LabelOutOfRange { label: y, n_classes: k });
        }
        steps.clear();
        let mut h = vec![0.0; hd];
        for &t in seq.iter().filter(|&&t| t != PAD) {
            let st = gru_cell(embedding(p, t), &h, p);
            let next = st.h.clone();
            steps.push((t, h, st));
            h = next;
        }
        let mask = masks.map(|m| m[s].as_slice());
        let hdrop: Vec<f64> = match mask {
            Some(m) => h.iter().zip(m).map(|(a, b)| a * b).collect(),
            None => h.clone(),
        };
        let logits = head(p, &hdrop);
        let probs = softmax(&logits);
        let w = class_weights[y];
        let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + logits.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += w * (lse - logits[y]) * inv_b;

        let dlogits: Vec<f64> = (0..k).map(|c| w * inv_b * (probs[c] - f64::from(c == y))).collect();
        outer_add(&mut grad[r(Block::Wo)], &dlogits, &hdrop);
        grad[r(Block::Bo)].iter_mut().zip(&dlogits).for_each(|(g, v)| *g += v);
        let mut dh = vec![0.0; hd];
        matvec_t_add(&mut dh, p.block(Block::Wo), &dlogits);
        if let Some(m) = mask {
            dh.iter_mut().zip(m).for_each(|(a, b)| *a *= b);
        }

        for (tok, h_prev, st) in steps.iter().rev() {
            let x = embedding(p, *tok);
            let mut dh_prev: Vec<f64> = (0..hd).map(|j| dh[j] * (1.0 - st.z[j])).collect();
            let da_h: Vec<f64> = (0..hd).map(|j| dh[j] * st.z[j] * (1.0 - st.candidate[j] * st.candidate[j])).collect();
            let da_z: Vec<f64> = (0..hd)
                .map(|j| dh[j] * (st.candidate[j] - h_prev[j]) * st.z[j] * (1.0 - st.z[j]))
                .collect();
            let rh: Vec<f64> = (0..hd).map(|j| st.r[j] * h_prev[j]).collect();
            let mut drh = vec![0.0; hd];
            matvec_t_add(&mut drh, p.block(Block::Uh), &da_h);
            let da_r: Vec<f64> = (0..hd).map(|j| drh[j] * h_prev[j] * st.r[j] * (1.0 - st.r[j])).collect();
            for j in 0..hd {
                dh_prev[j] += drh[j] * st.r[j];
            }
            let mut dx = vec![0.0; e];
            for (wb, ub, bb, da, hin) in [
                (Block::Wz, Block::Uz, Block::Bz, &da_z, h_prev.as_slice()),
                (Block::Wr, Block::Ur, Block::Br, &da_r, h_prev.as_slice()),
                (Block::Wh, Block::Uh, Block::Bh, &da_h, rh.as_slice()),
            ] {
                outer_add(&mut grad[r(wb)], da, x);
                outer_add(&mut grad[r(ub)], da, hin);
                grad[r(bb)].iter_mut().zip(da.iter()).for_each(|(g, v)| *g += v);
                matvec_t_add(&mut dx, p.block(wb), da);
                if ub != Block::Uh {
                    matvec_t_add(&mut dh_prev, p.block(ub), da);
                }
            }
            let er = r(Block::Embedding);
            let row = &mut grad[er.start + tok * e..er.start + (tok + 1) * e];
            row.iter_mut().zip(&dx).for_each(|(g, v)| *g += v);
            dh = dh_prev;
        }
    }
    Ok(loss)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GruTrainConfig {
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub dropout: f64,
    pub class_weight: ClassWeightMode,
    pub seed: u64,
}

impl Default for GruTrainConfig {
    fn default() -> Self {
        GruTrainConfig {
            embedding_dim: 200,
            hidden_dim: 256,
            learning_rate: 1e-3,
            epochs: 5,
            batch_size: 32,
            dropout: 0.2,
            class_weight: ClassWeightMode::Balanced,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_weighted_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GruFit {
    /// Parameters after the epoch with the best validation weighted F1
    /// (earliest epoch on ties).
    pub params: GruParams,
    pub best_epoch: usize,
    pub history: Vec<EpochLog>,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = Self::B1 * self.m[i] + (1.0 - Self::B1) * g;
            self.v[i] = Self::B2 * self.v[i] + (1.0 - Self::B2) * g * g;
            params[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + Self::EPS);
        }
    }
}

/// Mini-batch Adam on the encoded training split. Initialization draws from
/// `child_seed(seed, Init, 0)`, epoch `e` shuffles with
/// `child_seed(seed, Shuffle, e)` and draws its dropout masks from
/// `child_seed(seed, Dropout, e)`.
pub fn train(
    train_x: &[Vec<usize>],
    train_y: &[LabelId],
    val_x: &[Vec<usize>],
    val_y: &[LabelId],
    vocab_size: usize,
    n_classes: usize,
    config: &GruTrainConfig,
) -> Result<GruFit> {
    if train_x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if train_x.len() != train_y.len() || val_x.len() != val_y.len() {
        return Err(Error::DimensionMismatch {
            expected: train_x.len(),
            got: train_y.len(),
        });
    }
    if config.embedding_dim == 0 || config.hidden_dim == 0 || config.batch_size == 0 || config.epochs == 0 {
        return Err(Error::InvalidConfig("GRU dimensions, batch size and epochs must be >= 1".into()));
    }
    if !(config.learning_rate >= 0.0) || !(0.0..1.0).contains(&config.dropout) {
        return Err(Error::InvalidConfig("GRU learning rate must be >= 0 and dropout in [0, 1)".into()));
    }
    let weights = class_weights(train_y, n_classes, config.class_weight)?;
    let dims = GruDims {
        vocab_size,
        embedding_dim: config.embedding_dim,
        hidden_dim: config.hidden_dim,
        n_classes,
    };
    let mut params = GruParams::init(dims, config.dropout, &mut rng(child_seed(config.seed, Stream::Init, 0)));
    let mut adam = Adam {
        m: vec![0.0; params.data.len()],
        v: vec![0.0; params.data.len()],
        t: 0,
    };
    let mut grad = vec![0.0; params.data.len()];
    let mut order: Vec<usize> = (0..train_x.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, GruParams)> = None;
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng(child_seed(config.seed, Stream::Shuffle, epoch as u64)));
        let mut drop_rng = rng(child_seed(config.seed, Stream::Dropout, epoch as u64));
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<(&[usize], LabelId)> = chunk.iter().map(|&i| (train_x[i].as_slice(), train_y[i])).collect();
            let masks: Vec<Vec<f64>> = chunk.iter().map(|_| dropout_mask(dims.hidden_dim, config.dropout, &mut drop_rng)).collect();
            grad.iter_mut().for_each(|g| *g = 0.0);
            let loss = accumulate_gradients(&params, &batch, &weights, Some(&masks), &mut grad)?;
            epoch_loss += loss * chunk.len() as f64;
            adam.step(&mut params.data, &grad, config.learning_rate);
        }
        let f1 = if val_x.is_empty() {
            0.0
        } else {
            let pred = val_x
                .iter()
                .map(|s| forward(s, &params, None).map(|l| argmax(&l)))
                .collect::<Result<Vec<_>>>()?;
            weighted_f1(val_y, &pred, n_classes)?
        };
        history.push(EpochLog {
            epoch,
            train_loss: epoch_loss / train_x.len() as f64,
            validation_weighted_f1: f1,
        });
        if best.as_ref().map_or(true, |b| f1 > b.0) {
            best = Some((f1, epoch, params.clone()));
        }
    }
    let (_, best_epoch, params) = best.expect("at least one epoch");
    Ok(GruFit {
        params,
        best_epoch,
        history,
    })
}
