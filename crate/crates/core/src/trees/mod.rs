//! Decision trees, bagged forests and histogram gradient boosting.
//!
//! All three learners share [`Tree`], a flat node arena: node 0 is the root
//! and every child index is larger than its parent's, which makes decoding a
//! tree from JSON a linear check with no recursion.

mod cart;
mod forest;
mod gbdt;

pub use cart::{best_split, fit_cart, DecisionTree, Split};
pub use forest::{feature_importance, fit_forest, ForestModel};
pub use gbdt::{fit_gbdt, BinMapper, BinnedData, GbdtModel, HistSplit, LeafStats, LAMBDA_REG, MAX_BINS};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::linear::argmax;
use crate::ClassWeightMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Gini,
    Entropy,
}

/// Hyperparameters of all three learners; each uses the fields it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeConfig {
    pub criterion: Criterion,
    /// `None` (or `-1` / `null` in JSON) grows until another rule stops.
    #[serde(deserialize_with = "depth_from_json")]
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub class_weight: ClassWeightMode,
    pub n_estimators: usize,
    /// Forest only; `false` trains every tree on the full sample.
    pub bootstrap: bool,
    /// Forest features per split; `None` means `ceil(sqrt(D))`.
    pub max_features: Option<usize>,
    pub learning_rate: f64,
    pub num_leaves: usize,
    pub min_child_samples: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            class_weight: ClassWeightMode::None,
            n_estimators: 100,
            bootstrap: true,
            max_features: None,
            learning_rate: 0.1,
            num_leaves: 31,
            min_child_samples: 20,
        }
    }
}

fn depth_from_json<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<usize>, D::Error> {
    let v: Option<i64> = Option::deserialize(d)?;
    Ok(match v {
        Some(n) if n >= 0 => Some(n as usize),
        _ => None,
    })
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            self.min_samples_split,
            self.min_samples_leaf,
            self.n_estimators,
            self.num_leaves,
            self.min_child_samples,
        ];
        if counts.iter().any(|&c| c < 1) || self.max_features == Some(0) {
            return Err(Error::InvalidConfig("tree counts must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        if self.num_leaves < 2 {
            return Err(Error::InvalidConfig("num_leaves must be >= 2".into()));
        }
        Ok(())
    }
}

/// Impurity of weighted class counts. Entropy uses the natural log and
/// `0 ln 0 = 0`.
pub fn impurity(counts: &[f64], criterion: Criterion) -> Result<f64> {
    let total: f64 = counts.iter().sum();
    if !(total > 0.0) || counts.iter().any(|&c| c < 0.0) {
        return Err(Error::EmptyNode);
    }
    Ok(impurity_unchecked(counts, total, criterion))
}

#[inline]
pub(crate) fn impurity_unchecked(counts: &[f64], total: f64, criterion: Criterion) -> f64 {
    match criterion {
        Criterion::Gini => counts.iter().map(|&c| { let p = c / total; p * (1.0 - p) }).sum(),
        Criterion::Entropy => -counts
            .iter()
            .filter(|&&c| c > 0.0)
            .map(|&c| { let p = c / total; p * p.ln() })
            .sum::<f64>(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRule {
    pub feature: usize,
    /// Samples with `x[feature] <= threshold` go left.
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
    /// Impurity decrease (CART) or Newton gain (boosting) of this split.
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub n_samples: usize,
    pub impurity: f64,
    /// Unweighted class counts of the training samples reaching the node;
    /// empty for boosting trees.
    #[serde(default)]
    pub counts: Vec<usize>,
    /// Boosting leaf output; unused by classification trees.
    #[serde(default)]
    pub value: f64,
    #[serde(default)]
    pub split: Option<SplitRule>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_for(&self, x: &[f64]) -> &Node {
        let mut i = 0;
        loop {
            let node = &self.nodes[i];
            match &node.split {
                Some(s) => i = if x[s.feature] <= s.threshold { s.left } else { s.right },
                None => return node,
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut max = 0;
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(s) = &n.split {
                depth[s.left] = depth[i] + 1;
                depth[s.right] = depth[i] + 1;
                max = max.max(depth[i] + 1);
            }
        }
        max
    }

    /// Class with the largest weighted count at the reached leaf; ties go
    /// to the lowest id.
    pub fn predict_class(&self, x: &[f64], weights: &[f64]) -> usize {
        let leaf = self.leaf_for(x);
        let scores: Vec<f64> = leaf.counts.iter().zip(weights).map(|(&c, w)| c as f64 * w).collect();
        argmax(&scores)
    }

    /// Checks arena shape: root at 0, children after parents, every
    /// non-root node referenced once, features in range, and class counts
    /// that sum to `n_samples` when `n_classes` is given.
    pub fn validate(&self, n_features: usize, n_classes: Option<usize>) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(format!("tree: {m}")));
        if self.nodes.is_empty() {
            return bad("no nodes".into());
        }
        let mut referenced = vec![false; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if !n.impurity.is_finite() || !n.value.is_finite() {
                return bad(format!("node {i} is not finite"));
            }
            if let Some(k) = n_classes {
                let total = n.counts.iter().try_fold(0usize, |a, &c| a.checked_add(c));
                if n.counts.len() != k || total != Some(n.n_samples) {
                    return bad(format!("node {i} class counts"));
                }
            }
            if let Some(s) = &n.split {
                if s.feature >= n_features || !s.threshold.is_finite() || !s.gain.is_finite() {
                    return bad(format!("node {i} split rule"));
                }
                for c in [s.left, s.right] {
                    if c <= i || c >= self.nodes.len() || referenced[c] {
                        return bad(format!("node {i} child {c}"));
                    }
                    referenced[c] = true;
                }
            }
        }
        if referenced.iter().skip(1).any(|r| !r) {
            return bad("unreachable node".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impurity_examples() {
        assert_eq!(impurity(&[10.0, 0.0], Criterion::Gini).unwrap(), 0.0);
        assert_eq!(impurity(&[5.0, 5.0], Criterion::Gini).unwrap(), 0.5);
        assert!((impurity(&[5.0, 5.0], Criterion::Entropy).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(impurity(&[3.0, 0.0, 0.0], Criterion::Entropy).unwrap(), 0.0);
        assert!(matches!(impurity(&[0.0, 0.0], Criterion::Gini), Err(Error::EmptyNode)));
    }

    #[test]
    fn max_depth_minus_one_is_unbounded() {
        let c: TreeConfig = serde_json::from_str(r#"{"max_depth": -1}"#).unwrap();
        assert_eq!(c.max_depth, None);
        let c: TreeConfig = serde_json::from_str(r#"{"max_depth": null}"#).unwrap();
        assert_eq!(c.max_depth, None);
        let c: TreeConfig = serde_json::from_str(r#"{"max_depth": 7}"#).unwrap();
        assert_eq!(c.max_depth, Some(7));
    }

    #[test]
    fn malformed_arena_rejected() {
        let leaf = |n| Node { n_samples: n, impurity: 0.0, counts: vec![n, 0], value: 0.0, split: None };
        let mut root = leaf(2);
        root.counts = vec![1, 1];
        root.split = Some(SplitRule { feature: 0, threshold: 0.5, left: 1, right: 1, gain: 0.1 });
        let t = Tree { nodes: vec![root.clone(), leaf(1), leaf(1)] };
        assert!(t.validate(1, Some(2)).is_err());
        root.split = Some(SplitRule { feature: 0, threshold: 0.5, left: 1, right: 2, gain: 0.1 });
        let mut t = Tree { nodes: vec![root, leaf(1), leaf(1)] };
        t.nodes[2].counts = vec![0, 1];
        t.validate(1, Some(2)).unwrap();
        assert!(t.validate(0, Some(2)).is_err());
        t.nodes[0].split.as_mut().unwrap().right = 0;
        assert!(t.validate(1, Some(2)).is_err());
    }
}
