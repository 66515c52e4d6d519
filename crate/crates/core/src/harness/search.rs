//! Search spaces, grid expansion, seeded random sampling and best-trial
//! selection.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::seeds::rng;

/// One hyperparameter assignment, keyed by parameter name.
pub type ParamSet = BTreeMap<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    Uniform,
    LogUniform,
    /// Integers in `[low, high]`, both inclusive.
    Integer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisValues {
    Grid { values: Vec<Value> },
    Range { low: f64, high: f64, law: Law },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    #[serde(flatten)]
    pub values: AxisValues,
}

impl Axis {
    pub fn grid(name: &str, values: Vec<Value>) -> Axis {
        Axis {
            name: name.to_string(),
            values: AxisValues::Grid { values },
        }
    }

    pub fn range(name: &str, low: f64, high: f64, law: Law) -> Axis {
        Axis {
            name: name.to_string(),
            values: AxisValues::Range { low, high, law },
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSearchSpace(format!("axis `{}`: {m}", self.name)));
        match &self.values {
            AxisValues::Grid { values } if values.is_empty() => bad("no values".into()),
            AxisValues::Grid { .. } => Ok(()),
            AxisValues::Range { low, high, law } => {
                if !(low.is_finite() && high.is_finite()) || low > high {
                    return bad(format!("range [{low}, {high}] is not ordered"));
                }
                if *law == Law::LogUniform && *low <= 0.0 {
                    return bad("log-uniform range must be positive".into());
                }
                if *law == Law::Integer && (low.fract() != 0.0 || high.fract() != 0.0) {
                    return bad("integer range needs integral bounds".into());
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Strategy {
    Grid,
    Random { n_trials: usize },
}

/// A union of grids, each a list of named axes (like a scikit-learn
/// `param_grid` list). Grid search expands each grid and concatenates the
/// results; random search draws each trial from grid `t mod n_grids`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub strategy: Strategy,
    pub grids: Vec<Vec<Axis>>,
}

impl SearchSpace {
    pub fn grid(axes: Vec<Axis>) -> Self {
        SearchSpace {
            strategy: Strategy::Grid,
            grids: vec![axes],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grids.is_empty() || self.grids.iter().any(|g| g.is_empty()) {
            return Err(Error::InvalidSearchSpace("search space needs at least one axis".into()));
        }
        for g in &self.grids {
            let mut names: Vec<&str> = g.iter().map(|a| a.name.as_str()).collect();
            names.sort_unstable();
            if names.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidSearchSpace("duplicate axis name".into()));
            }
            for a in g {
                a.validate()?;
            }
        }
        if let Strategy::Random { n_trials: 0 } = self.strategy {
            return Err(Error::InvalidSearchSpace("random search needs n_trials >= 1".into()));
        }
        Ok(())
    }

    /// Configurations this space describes under its own strategy.
    pub fn configurations(&self, seed: u64) -> Result<Vec<ParamSet>> {
        match self.strategy {
            Strategy::Grid => expand_grid(self),
            Strategy::Random { n_trials } => sample_random(self, n_trials, seed),
        }
    }
}

/// Cartesian product of every grid, first axis outermost, grids in order.
pub fn expand_grid(space: &SearchSpace) -> Result<Vec<ParamSet>> {
    space.validate()?;
    let mut out = Vec::new();
    for grid in &space.grids {
        let mut configs = vec![ParamSet::new()];
        for axis in grid {
            let AxisValues::Grid { values } = &axis.values else {
                return Err(Error::InvalidSearchSpace(format!("axis `{}` is a range; grid search needs value lists", axis.name)));
            };
            configs = configs
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |v| {
                        let mut next = c.clone();
                        next.insert(axis.name.clone(), v.clone());
                        next
                    })
                })
                .collect();
        }
        out.extend(configs);
    }
    Ok(out)
}

/// `n_trials` independent draws. Ranges follow their law; value lists are
/// drawn uniformly.
pub fn sample_random(space: &SearchSpace, n_trials: usize, seed: u64) -> Result<Vec<ParamSet>> {
    space.validate()?;
    if n_trials == 0 {
        return Err(Error::InvalidSearchSpace("random search needs n_trials >= 1".into()));
    }
    let mut r = rng(seed);
    Ok((0..n_trials)
        .map(|t| {
            let grid = &space.grids[t % space.grids.len()];
            grid.iter()
                .map(|axis| {
                    let v = match &axis.values {
                        AxisValues::Grid { values } => values[r.gen_range(0..values.len())].clone(),
                        AxisValues::Range { low, high, law } => match law {
                            Law::Uniform => Value::from(if low == high { *low } else { r.gen_range(*low..*high) }),
                            Law::LogUniform => {
                                let (a, b) = (low.ln(), high.ln());
                                Value::from(if a == b { *low } else { r.gen_range(a..b).exp().clamp(*low, *high) })
                            }
                            Law::Integer => Value::from(r.gen_range(*low as i64..=*high as i64)),
                        },
                    };
                    (axis.name.clone(), v)
                })
                .collect()
        })
        .collect())
}

/// Index of the largest score, earliest on ties; `None` entries are failed
/// trials and never win.
pub fn select_best(scores: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Some(v) = *s {
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    best.map(|(i, _)| i)
}
