//! Gradient boosting on histogram-binned features with leaf-wise growth.
//!
//! Each feature is quantized once into at most [`MAX_BINS`] bins. Bin `j`
//! holds the values `x` with `edge[j-1] < x <= edge[j]`, so a split "bin <= j"
//! is the raw-space rule `x <= edge[j]` and prediction never needs the bins.
//!
//! Rows are stored sparsely: only entries whose bin differs from the bin of
//! 0.0 are kept, and the zero-bin histogram entry of a leaf is recovered by
//! subtracting the other bins from the leaf totals. On TF-IDF input this
//! makes a histogram cost proportional to the leaf's non-zeros.

use serde::{Deserialize, Serialize};

use super::cart::check_xy;
use super::{Node, SplitRule, Tree, TreeConfig};
use crate::error::{Error, Result};
use crate::linear::{argmax, class_weights, sigmoid, softmax};
use crate::matrix::DenseMatrix;
use crate::LabelId;

pub const MAX_BINS: usize = 255;
/// Leaf regularizer in the Newton gain and leaf values.
pub const LAMBDA_REG: f64 = 1e-3;
/// Relative margin a gain must clear to displace the incumbent split.
const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinMapper {
    /// Per feature, strictly increasing upper bin edges; `edges.len() + 1` bins.
    pub edges: Vec<Vec<f64>>,
}

impl BinMapper {
    /// Midpoints between distinct values when a feature has at most
    /// `max_bins` of them; otherwise the values at the `j / max_bins`
    /// quantiles.
    pub fn fit(x: &DenseMatrix, max_bins: usize) -> BinMapper {
        let max_bins = max_bins.clamp(2, MAX_BINS);
        let n = x.rows();
        let edges = (0..x.cols())
            .map(|f| {
                let mut col: Vec<f64> = (0..n).map(|i| x.get(i, f)).collect();
                col.sort_by(f64::total_cmp);
                let mut distinct = col.clone();
                distinct.dedup();
                if distinct.len() <= max_bins {
                    return distinct.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
                }
                let top = col[n - 1];
                let mut e: Vec<f64> = (1..max_bins).map(|j| col[(j * n / max_bins).min(n - 1)]).filter(|&v| v < top).collect();
                e.dedup();
                e
            })
            .collect();
        BinMapper { edges }
    }

    pub fn n_features(&self) -> usize {
        self.edges.len()
    }

    pub fn n_bins(&self, feature: usize) -> usize {
        self.edges[feature].len() + 1
    }

    /// First `j` with `value <= edge[j]`, or the last bin.
    pub fn bin(&self, feature: usize, value: f64) -> u8 {
        self.edges[feature].partition_point(|&e| e < value) as u8
    }

    pub fn validate(&self) -> Result<()> {
        for (f, e) in self.edges.iter().enumerate() {
            let ok = e.len() < MAX_BINS && e.iter().all(|v| v.is_finite()) && e.windows(2).all(|w| w[0] < w[1]);
            if !ok {
                return Err(Error::InvalidModel(format!("gbdt: bin edges of feature {f}")));
            }
        }
        Ok(())
    }
}

/// Sparse row-wise bin codes.
#[derive(Debug, Clone)]
pub struct BinnedData {
    n_bins: Vec<usize>,
    offsets: Vec<usize>,
    zero_bin: Vec<u8>,
    rows: Vec<Vec<(u32, u8)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LeafStats {
    pub g: f64,
    pub h: f64,
    pub n: usize,
}

impl LeafStats {
    fn add(&mut self, g: f64, h: f64) {
        self.g += g;
        self.h += h;
        self.n += 1;
    }

    /// `G^2 / (H + lambda)`.
    pub fn score(&self, lambda: f64) -> f64 {
        self.g * self.g / (self.h + lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistSplit {
    pub feature: usize,
    /// Samples with bin `<= bin` go left.
    pub bin: usize,
    pub gain: f64,
    pub left: LeafStats,
    pub right: LeafStats,
}

/// Reusable histogram buffer: one `(G, H, n)` cell per (feature, bin).
struct Scratch {
    cells: Vec<LeafStats>,
    touched: Vec<bool>,
    list: Vec<usize>,
}

impl BinnedData {
    pub fn new(x: &DenseMatrix, mapper: &BinMapper) -> BinnedData {
        let d = x.cols();
        let n_bins: Vec<usize> = (0..d).map(|f| mapper.n_bins(f)).collect();
        let mut offsets = Vec::with_capacity(d);
        let mut acc = 0;
        for &b in &n_bins {
            offsets.push(acc);
            acc += b;
        }
        let zero_bin: Vec<u8> = (0..d).map(|f| mapper.bin(f, 0.0)).collect();
        let rows = (0..x.rows())
            .map(|i| {
                x.row(i)
                    .iter()
                    .enumerate()
                    .filter_map(|(f, &v)| {
                        let b = mapper.bin(f, v);
                        (b != zero_bin[f]).then_some((f as u32, b))
                    })
                    .collect()
            })
            .collect();
        BinnedData {
            n_bins,
            offsets,
            zero_bin,
            rows,
        }
    }

    pub fn bin_at(&self, row: usize, feature: usize) -> u8 {
        let r = &self.rows[row];
        match r.binary_search_by_key(&(feature as u32), |e| e.0) {
            Ok(p) => r[p].1,
            Err(_) => self.zero_bin[feature],
        }
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            cells: vec![LeafStats::default(); self.offsets.last().map_or(0, |o| o + self.n_bins[self.n_bins.len() - 1])],
            touched: vec![false; self.n_bins.len()],
            list: Vec::new(),
        }
    }

    /// Largest Newton gain `G_L^2/(H_L+l) + G_R^2/(H_R+l) - G_P^2/(H_P+l)`
    /// over all (feature, bin) thresholds with both children holding at
    /// least `min_child` samples. Ties keep the lower feature, then bin.
    pub fn best_split(&self, samples: &[usize], grad: &[f64], hess: &[f64], min_child: usize, lambda: f64) -> Option<HistSplit> {
        self.best_split_with(&mut self.scratch(), samples, grad, hess, min_child, lambda)
    }

    fn best_split_with(
        &self,
        s: &mut Scratch,
        samples: &[usize],
        grad: &[f64],
        hess: &[f64],
        min_child: usize,
        lambda: f64,
    ) -> Option<HistSplit> {
        let mut total = LeafStats::default();
        for &i in samples {
            total.add(grad[i], hess[i]);
            for &(f, b) in &self.rows[i] {
                let f = f as usize;
                if !s.touched[f] {
                    s.touched[f] = true;
                    s.list.push(f);
                }
                s.cells[self.offsets[f] + b as usize].add(grad[i], hess[i]);
            }
        }
        s.list.sort_unstable();
        let parent = total.score(lambda);
        let mut best: Option<HistSplit> = None;
        for &f in &s.list {
            let cells = &mut s.cells[self.offsets[f]..self.offsets[f] + self.n_bins[f]];
            let mut rest = LeafStats::default();
            for c in cells.iter() {
                rest.g += c.g;
                rest.h += c.h;
                rest.n += c.n;
            }
            let z = self.zero_bin[f] as usize;
            cells[z] = LeafStats {
                g: total.g - rest.g,
                h: total.h - rest.h,
                n: total.n - rest.n,
            };
            let mut left = LeafStats::default();
            for (j, c) in cells.iter().enumerate().take(cells.len() - 1) {
                left.g += c.g;
                left.h += c.h;
                left.n += c.n;
                let right = LeafStats {
                    g: total.g - left.g,
                    h: total.h - left.h,
                    n: total.n - left.n,
                };
                if left.n < min_child || right.n < min_child {
                    continue;
                }
                let gain = left.score(lambda) + right.score(lambda) - parent;
                if best.map_or(true, |b| gain > b.gain + GAIN_EPS * b.gain.abs().max(1.0)) {
                    best = Some(HistSplit { feature: f, bin: j, gain, left, right });
                }
            }
            cells.iter_mut().for_each(|c| *c = LeafStats::default());
            s.touched[f] = false;
        }
        s.list.clear();
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub n_classes: usize,
    pub n_features: usize,
    pub learning_rate: f64,
    pub num_leaves: usize,
    pub max_depth: Option<usize>,
    pub min_child_samples: usize,
    pub lambda: f64,
    /// One raw score for binary, one per class otherwise.
    pub base_score: Vec<f64>,
    pub bins: BinMapper,
    /// One tree per round for binary, `n_classes` per round otherwise.
    pub rounds: Vec<Vec<Tree>>,
    /// Weighted mean training log-loss before the first round and after each.
    pub train_loss: Vec<f64>,
    pub class_weights: Vec<f64>,
}

fn leaf_value(stats: &LeafStats, lambda: f64, lr: f64) -> f64 {
    -stats.g / (stats.h + lambda) * lr
}

struct Leaf {
    node: usize,
    depth: usize,
    samples: Vec<usize>,
    cand: Option<HistSplit>,
}

/// Grows one tree leaf-wise and returns it with the value assigned to each
/// sample's leaf.
#[allow(clippy::too_many_arguments)]
fn grow_leafwise(
    data: &BinnedData,
    mapper: &BinMapper,
    scratch: &mut Scratch,
    grad: &[f64],
    hess: &[f64],
    num_leaves: usize,
    max_depth: Option<usize>,
    min_child: usize,
    lr: f64,
    out: &mut [f64],
) -> Tree {
    let can_split = |depth: usize| max_depth.map_or(true, |m| depth < m);
    let all: Vec<usize> = (0..grad.len()).collect();
    let total = all.iter().fold(LeafStats::default(), |mut s, &i| {
        s.add(grad[i], hess[i]);
        s
    });
    let mut nodes = vec![Node {
        n_samples: all.len(),
        impurity: 0.0,
        counts: vec![],
        value: leaf_value(&total, LAMBDA_REG, lr),
        split: None,
    }];
    let cand = if can_split(0) { data.best_split_with(scratch, &all, grad, hess, min_child, LAMBDA_REG) } else { None };
    let mut leaves = vec![Leaf { node: 0, depth: 0, samples: all, cand }];
    while leaves.len() < num_leaves {
        let mut pick: Option<usize> = None;
        for (li, l) in leaves.iter().enumerate() {
            if let Some(c) = &l.cand {
                if c.gain > 0.0 && pick.map_or(true, |p| c.gain > leaves[p].cand.unwrap().gain) {
                    pick = Some(li);
                }
            }
        }
        let Some(li) = pick else { break };
        let leaf = leaves.swap_remove(li);
        let c = leaf.cand.unwrap();
        let (ls, rs): (Vec<usize>, Vec<usize>) = leaf.samples.iter().partition(|&&i| data.bin_at(i, c.feature) as usize <= c.bin);
        let (lid, rid) = (nodes.len(), nodes.len() + 1);
        for (stats, n) in [(c.left, ls.len()), (c.right, rs.len())] {
            nodes.push(Node {
                n_samples: n,
                impurity: 0.0,
                counts: vec![],
                value: leaf_value(&stats, LAMBDA_REG, lr),
                split: None,
            });
        }
        nodes[leaf.node].split = Some(SplitRule {
            feature: c.feature,
            threshold: mapper.edges[c.feature][c.bin],
            left: lid,
            right: rid,
            gain: c.gain,
        });
        let depth = leaf.depth + 1;
        let (lc, rc) = if can_split(depth) {
            (
                data.best_split_with(scratch, &ls, grad, hess, min_child, LAMBDA_REG),
                data.best_split_with(scratch, &rs, grad, hess, min_child, LAMBDA_REG),
            )
        } else {
            (None, None)
        };
        leaves.push(Leaf { node: lid, depth, samples: ls, cand: lc });
        leaves.push(Leaf { node: rid, depth, samples: rs, cand: rc });
        // node order, so gain ties resolve to the older leaf
        leaves.sort_by_key(|l| l.node);
    }
    for l in &leaves {
        let v = nodes[l.node].value;
        for &i in &l.samples {
            out[i] = v;
        }
    }
    Tree { nodes }
}

fn weighted_log_loss(raw: &[Vec<f64>], y: &[LabelId], sw: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut wsum = 0.0;
    for ((r, &yi), &w) in raw.iter().zip(y).zip(sw) {
        let ce = if r.len() == 1 {
            // -log sigmoid(+-z) = softplus(-+z)
            let z = if yi == 1 { -r[0] } else { r[0] };
            z.max(0.0) + (-z.abs()).exp().ln_1p()
        } else {
            let m = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + r.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            lse - r[yi]
        };
        total += w * ce;
        wsum += w;
    }
    total / wsum
}

/// Boosts `n_estimators` rounds on the weighted log-loss (sigmoid for two
/// classes, softmax otherwise). The base score is the weighted log-odds
/// (binary) or log class priors.
pub fn fit_gbdt(x: &DenseMatrix, y: &[LabelId], n_classes: usize, config: &TreeConfig, _seed: u64) -> Result<GbdtModel> {
    config.validate()?;
    check_xy(x, y, n_classes)?;
    let mut present = y.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::SingleClass(present.len()));
    }
    let weights = class_weights(y, n_classes, config.class_weight)?;
    let sw: Vec<f64> = y.iter().map(|&c| weights[c]).collect();
    let wsum: f64 = sw.iter().sum();
    let n = y.len();
    let k_out = if n_classes == 2 { 1 } else { n_classes };
    let mut prior = vec![0.0; n_classes];
    for (&c, &w) in y.iter().zip(&sw) {
        prior[c] += w / wsum;
    }
    let base_score: Vec<f64> = if k_out == 1 {
        vec![(prior[1] / prior[0]).ln()]
    } else {
        prior.iter().map(|p| p.max(1e-15).ln()).collect()
    };
    let bins = BinMapper::fit(x, MAX_BINS);
    let data = BinnedData::new(x, &bins);
    let mut scratch = data.scratch();
    let mut raw: Vec<Vec<f64>> = vec![base_score.clone(); n];
    let mut train_loss = vec![weighted_log_loss(&raw, y, &sw)];
    let mut rounds = Vec::with_capacity(config.n_estimators);
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut step = vec![0.0; n];
    for _ in 0..config.n_estimators {
        let probs: Vec<Vec<f64>> = raw
            .iter()
            .map(|r| if k_out == 1 { vec![sigmoid(r[0])] } else { softmax(r) })
            .collect();
        let mut trees = Vec::with_capacity(k_out);
        let mut updates = Vec::with_capacity(k_out);
        for k in 0..k_out {
            for i in 0..n {
                let target = if k_out == 1 { (y[i] == 1) as u8 as f64 } else { (y[i] == k) as u8 as f64 };
                let p = probs[i][k];
                grad[i] = sw[i] * (p - target);
                hess[i] = sw[i] * p * (1.0 - p);
            }
            let tree = grow_leafwise(
                &data,
                &bins,
                &mut scratch,
                &grad,
                &hess,
                config.num_leaves,
                config.max_depth,
                config.min_child_samples,
                config.learning_rate,
                &mut step,
            );
            trees.push(tree);
            updates.push(step.clone());
        }
        for (k, u) in updates.iter().enumerate() {
            for (r, v) in raw.iter_mut().zip(u) {
                r[k] += v;
            }
        }
        train_loss.push(weighted_log_loss(&raw, y, &sw));
        rounds.push(trees);
    }
    Ok(GbdtModel {
        n_classes,
        n_features: x.cols(),
        learning_rate: config.learning_rate,
        num_leaves: config.num_leaves,
        max_depth: config.max_depth,
        min_child_samples: config.min_child_samples,
        lambda: LAMBDA_REG,
        base_score,
        bins,
        rounds,
        train_loss,
        class_weights: weights,
    })
}

impl GbdtModel {
    pub fn raw_scores(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.base_score.clone();
        for round in &self.rounds {
            for (k, t) in round.iter().enumerate() {
                r[k] += t.leaf_for(x).value;
            }
        }
        r
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let r = self.raw_scores(x);
        if r.len() == 1 {
            let p = sigmoid(r[0]);
            vec![1.0 - p, p]
        } else {
            softmax(&r)
        }
    }

    pub fn predict(&self, x: &[f64]) -> LabelId {
        argmax(&self.predict_proba(x))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidModel(format!("gbdt: {m}")));
        let k_out = if self.n_classes == 2 { 1 } else { self.n_classes };
        if self.n_classes < 2 || self.base_score.len() != k_out || self.class_weights.len() != self.n_classes {
            return bad("class count");
        }
        if self.base_score.iter().any(|v| !v.is_finite()) || !(self.learning_rate > 0.0) || self.num_leaves < 2 {
            return bad("scalars");
        }
        if self.bins.n_features() != self.n_features {
            return bad("bin table width");
        }
        self.bins.validate()?;
        for round in &self.rounds {
            if round.len() != k_out {
                return bad("trees per round");
            }
            for t in round {
                t.validate(self.n_features, None)?;
                if t.n_leaves() > self.num_leaves {
                    return bad("leaf cap exceeded");
                }
            }
        }
        Ok(())
    }
}
