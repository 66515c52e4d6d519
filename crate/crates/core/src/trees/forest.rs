use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cart::{check_xy, Grower};
use super::{Tree, TreeConfig};
use crate::error::{Error, Result};
use crate::linear::{argmax, class_weights};
use crate::matrix::DenseMatrix;
use crate::seeds::{child_seed, rng, Stream};
use crate::LabelId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    /// Seed each tree's bootstrap and feature draws came from.
    pub tree_seeds: Vec<u64>,
    pub max_features: usize,
    pub n_classes: usize,
    pub n_features: usize,
    pub class_weights: Vec<f64>,
}

/// Bagged CART ensemble. Tree `t` draws its bootstrap sample from
/// `child_seed(seed, Bootstrap, t)` and its per-split feature subsets from
/// `child_seed(seed, Sampling, t)`, so trees can grow in parallel and the
/// result does not depend on scheduling.
pub fn fit_forest(x: &DenseMatrix, y: &[LabelId], n_classes: usize, config: &TreeConfig, seed: u64) -> Result<ForestModel> {
    config.validate()?;
    check_xy(x, y, n_classes)?;
    let weights = class_weights(y, n_classes, config.class_weight)?;
    let d = x.cols();
    let m = config
        .max_features
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d.max(1));
    let n = y.len();
    let grower = Grower {
        x,
        y,
        weights: &weights,
        n_classes,
        config,
    };
    let tree_seeds: Vec<u64> = (0..config.n_estimators as u64).map(|t| child_seed(seed, Stream::Bootstrap, t)).collect();
    let trees = (0..config.n_estimators)
        .into_par_iter()
        .map(|t| {
            let samples: Vec<usize> = if config.bootstrap {
                let mut r = rng(tree_seeds[t]);
                (0..n).map(|_| r.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut features_rng = rng(child_seed(seed, Stream::Sampling, t as u64));
            grower.grow(samples, Some((&mut features_rng, m)))
        })
        .collect();
    Ok(ForestModel {
        trees,
        tree_seeds,
        max_features: m,
        n_classes,
        n_features: d,
        class_weights: weights,
    })
}

impl ForestModel {
    pub fn votes(&self, x: &[f64]) -> Vec<usize> {
        let mut votes = vec![0usize; self.n_classes];
        for t in &self.trees {
            votes[t.predict_class(x, &self.class_weights)] += 1;
        }
        votes
    }

    /// Majority vote; ties go to the lowest class id.
    pub fn predict(&self, x: &[f64]) -> LabelId {
        argmax(&self.votes(x).iter().map(|&v| v as f64).collect::<Vec<_>>())
    }

    /// Vote fractions, used as ranking scores.
    pub fn class_scores(&self, x: &[f64]) -> Vec<f64> {
        let n = self.trees.len() as f64;
        self.votes(x).iter().map(|&v| v as f64 / n).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trees.is_empty() || self.tree_seeds.len() != self.trees.len() {
            return Err(Error::InvalidModel("forest: tree list".into()));
        }
        if self.max_features < 1 || self.max_features > self.n_features.max(1) || self.class_weights.len() != self.n_classes {
            return Err(Error::InvalidModel("forest: shape".into()));
        }
        for t in &self.trees {
            t.validate(self.n_features, Some(self.n_classes))?;
        }
        Ok(())
    }
}

/// Mean over trees of each feature's total weighted impurity decrease
/// (`W_node / W_root * gain`), normalized to sum to 1. All zeros when no
/// tree split at all.
pub fn feature_importance(forest: &ForestModel) -> Vec<f64> {
    let mut imp = vec![0.0; forest.n_features];
    let weight = |counts: &[usize]| -> f64 { counts.iter().zip(&forest.class_weights).map(|(&c, w)| c as f64 * w).sum() };
    for t in &forest.trees {
        let root = weight(&t.nodes[0].counts);
        for n in &t.nodes {
            if let Some(s) = &n.split {
                imp[s.feature] += weight(&n.counts) / root * s.gain;
            }
        }
    }
    let total: f64 = imp.iter().sum();
    if total > 0.0 {
        imp.iter_mut().for_each(|v| *v /= total);
    }
    imp
}
