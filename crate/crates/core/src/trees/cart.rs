use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{impurity_unchecked, Node, SplitRule, Tree, TreeConfig};
use crate::error::{Error, Result};
use crate::linear::class_weights;
use crate::matrix::DenseMatrix;
use crate::LabelId;

/// Splits whose impurity decrease does not beat the incumbent by more than
/// this are treated as ties, and a best decrease at or below it as none.
pub(crate) const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// `I_parent - (W_L / W) I_L - (W_R / W) I_R` on weighted counts.
    pub gain: f64,
    pub n_left: usize,
    pub n_right: usize,
}

pub(crate) struct Grower<'a> {
    pub x: &'a DenseMatrix,
    pub y: &'a [LabelId],
    pub weights: &'a [f64],
    pub n_classes: usize,
    pub config: &'a TreeConfig,
}

impl Grower<'_> {
    fn weighted_counts(&self, samples: &[usize]) -> (Vec<usize>, Vec<f64>) {
        let mut counts = vec![0usize; self.n_classes];
        let mut w = vec![0.0; self.n_classes];
        for &i in samples {
            counts[self.y[i]] += 1;
            w[self.y[i]] += self.weights[self.y[i]];
        }
        (counts, w)
    }

    /// Best split over `features` (ascending), or `None`.
    pub fn find_split(&self, samples: &[usize], features: &[usize]) -> Option<Split> {
        let crit = self.config.criterion;
        let min_leaf = self.config.min_samples_leaf.max(1);
        let n = samples.len();
        if n < 2 * min_leaf {
            return None;
        }
        let (_, parent) = self.weighted_counts(samples);
        let total: f64 = parent.iter().sum();
        let parent_imp = impurity_unchecked(&parent, total, crit);
        let mut best: Option<Split> = None;
        let mut column: Vec<(f64, LabelId)> = Vec::with_capacity(n);
        let mut left = vec![0.0; self.n_classes];
        let mut right = vec![0.0; self.n_classes];
        for &f in features {
            column.clear();
            column.extend(samples.iter().map(|&i| (self.x.get(i, f), self.y[i])));
            column.sort_by(|a, b| a.0.total_cmp(&b.0));
            if column[0].0 == column[n - 1].0 {
                continue;
            }
            left.iter_mut().for_each(|v| *v = 0.0);
            right.copy_from_slice(&parent);
            let mut w_left = 0.0;
            for pos in 0..n - 1 {
                let (v, label) = column[pos];
                let w = self.weights[label];
                left[label] += w;
                right[label] -= w;
                w_left += w;
                let next = column[pos + 1].0;
                let n_left = pos + 1;
                if v == next || n_left < min_leaf || n - n_left < min_leaf {
                    continue;
                }
                let w_right = total - w_left;
                if !(w_left > 0.0 && w_right > 0.0) {
                    continue;
                }
                let gain = parent_imp
                    - (w_left / total) * impurity_unchecked(&left, w_left, crit)
                    - (w_right / total) * impurity_unchecked(&right, w_right, crit);
                if best.map_or(true, |b| gain > b.gain + GAIN_EPS) {
                    let mut threshold = 0.5 * (v + next);
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some(Split {
                        feature: f,
                        threshold,
                        gain,
                        n_left,
                        n_right: n - n_left,
                    });
                }
            }
        }
        best.filter(|b| b.gain > GAIN_EPS)
    }

    /// Grows a tree depth-first. With `sampler = Some((rng, m))` each node
    /// draws `m` distinct features; otherwise every feature is a candidate.
    pub fn grow(&self, samples: Vec<usize>, mut sampler: Option<(&mut ChaCha8Rng, usize)>) -> Tree {
        let d = self.x.cols();
        let all: Vec<usize> = (0..d).collect();
        let mut nodes = vec![];
        let mut stack = vec![(0usize, samples, 0usize)];
        nodes.push(self.node_for(&stack[0].1));
        while let Some((idx, samples, depth)) = stack.pop() {
            let node = &nodes[idx];
            let stop = self.config.max_depth.is_some_and(|m| depth >= m)
                || samples.len() < self.config.min_samples_split.max(2)
                || node.impurity <= 0.0;
            if stop {
                continue;
            }
            let features = match sampler.as_mut() {
                Some((rng, m)) if *m < d => {
                    let mut f = rand::seq::index::sample(*rng, d, *m).into_vec();
                    f.sort_unstable();
                    f
                }
                _ => all.clone(),
            };
            let Some(split) = self.find_split(&samples, &features) else { continue };
            let (l, r): (Vec<usize>, Vec<usize>) =
                samples.iter().partition(|&&i| self.x.get(i, split.feature) <= split.threshold);
            let (li, ri) = (nodes.len(), nodes.len() + 1);
            nodes.push(self.node_for(&l));
            nodes.push(self.node_for(&r));
            nodes[idx].split = Some(SplitRule {
                feature: split.feature,
                threshold: split.threshold,
                left: li,
                right: ri,
                gain: split.gain,
            });
            stack.push((ri, r, depth + 1));
            stack.push((li, l, depth + 1));
        }
        Tree { nodes }
    }

    fn node_for(&self, samples: &[usize]) -> Node {
        let (counts, w) = self.weighted_counts(samples);
        let total: f64 = w.iter().sum();
        Node {
            n_samples: samples.len(),
            impurity: if total > 0.0 { impurity_unchecked(&w, total, self.config.criterion) } else { 0.0 },
            counts,
            value: 0.0,
            split: None,
        }
    }
}

/// Best split of `samples` over every feature. Candidate thresholds are the
/// midpoints of consecutive distinct values; ties keep the lower feature id,
/// then the lower threshold. `None` when the node is below
/// `min_samples_split`, no split has positive gain, or every split would
/// leave a child under `min_samples_leaf`.
pub fn best_split(
    x: &DenseMatrix,
    y: &[LabelId],
    samples: &[usize],
    n_classes: usize,
    class_weights: &[f64],
    config: &TreeConfig,
) -> Option<Split> {
    if samples.len() < config.min_samples_split.max(2) {
        return None;
    }
    let g = Grower {
        x,
        y,
        weights: class_weights,
        n_classes,
        config,
    };
    let features: Vec<usize> = (0..x.cols()).collect();
    g.find_split(samples, &features)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub tree: Tree,
    pub class_weights: Vec<f64>,
    pub n_classes: usize,
    pub n_features: usize,
}

pub(crate) fn check_xy(x: &DenseMatrix, y: &[LabelId], n_classes: usize) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if let Some(row) = x.first_non_finite_row() {
        return Err(Error::NonFinite { row });
    }
    if let Some(&label) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::LabelOutOfRange { label, n_classes });
    }
    Ok(())
}

pub fn fit_cart(x: &DenseMatrix, y: &[LabelId], n_classes: usize, config: &TreeConfig) -> Result<DecisionTree> {
    config.validate()?;
    check_xy(x, y, n_classes)?;
    let weights = class_weights(y, n_classes, config.class_weight)?;
    let tree = Grower {
        x,
        y,
        weights: &weights,
        n_classes,
        config,
    }
    .grow((0..y.len()).collect(), None);
    Ok(DecisionTree {
        tree,
        class_weights: weights,
        n_classes,
        n_features: x.cols(),
    })
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64]) -> usize {
        self.tree.predict_class(x, &self.class_weights)
    }

    /// Weighted class distribution at the reached leaf.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let leaf = self.tree.leaf_for(x);
        let w: Vec<f64> = leaf.counts.iter().zip(&self.class_weights).map(|(&c, w)| c as f64 * w).collect();
        let total: f64 = w.iter().sum();
        w.iter().map(|v| v / total).collect()
    }
}
