//! Versioned experiment configuration, default search spaces and the
//! published best-configuration presets.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::search::{Axis, Law, ParamSet, SearchSpace, Strategy};
use super::synthetic::SyntheticSpec;
use crate::corpus::{CleanOptions, SchemeKind};
use crate::error::{Error, Result};
use crate::features::TfIdfConfig;
use crate::gru::MAX_SEQ_LEN;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    Logistic,
    Svm,
    Rf,
    Gbdt,
    Gru,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 5] = [ModelFamily::Logistic, ModelFamily::Svm, ModelFamily::Rf, ModelFamily::Gbdt, ModelFamily::Gru];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Logistic => "logistic",
            ModelFamily::Svm => "svm",
            ModelFamily::Rf => "rf",
            ModelFamily::Gbdt => "gbdt",
            ModelFamily::Gru => "gru",
        }
    }

    /// Stable index used in trial seed derivation.
    pub fn index(self) -> u64 {
        self as u64
    }

    pub fn parse(s: &str) -> Result<ModelFamily> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model family `{s}`")))
    }
}

/// Where documents come from: a CSV file or the built-in generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusSource {
    Csv(PathBuf),
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SequenceSettings {
    pub max_len: usize,
    pub min_freq: usize,
}

impl Default for SequenceSettings {
    fn default() -> Self {
        SequenceSettings { max_len: 64, min_freq: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub corpus: CorpusSource,
    pub scheme: SchemeKind,
    /// Explicit multiclass label order; derived from the data when absent.
    #[serde(default)]
    pub classes: Option<Vec<String>>,
    pub seed: u64,
    #[serde(default)]
    pub stratified: bool,
    #[serde(default)]
    pub clean: CleanOptions,
    #[serde(default)]
    pub tfidf: TfIdfConfig,
    #[serde(default)]
    pub sequence: SequenceSettings,
    /// Per-family search spaces; families not listed use the defaults.
    #[serde(default)]
    pub search: BTreeMap<ModelFamily, SearchSpace>,
    /// Run trials on the worker pool.
    #[serde(default = "yes")]
    pub parallel: bool,
    /// Report every trial duration as 0 so reports are byte-reproducible.
    #[serde(default)]
    pub fixed_clock: bool,
    /// Command-line overrides applied on top of the file, echoed in reports.
    #[serde(default)]
    pub overrides: BTreeMap<String, Value>,
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn new(corpus: CorpusSource, scheme: SchemeKind, seed: u64) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            corpus,
            scheme,
            classes: None,
            seed,
            stratified: false,
            clean: CleanOptions::default(),
            tfidf: TfIdfConfig::default(),
            sequence: SequenceSettings::default(),
            search: BTreeMap::new(),
            parallel: true,
            fixed_clock: false,
            overrides: BTreeMap::new(),
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_slice(bytes)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.scheme == SchemeKind::Binary && self.classes.is_some() {
            return Err(Error::InvalidConfig("`classes` only applies to the multiclass scheme".into()));
        }
        let (lo, hi) = self.tfidf.ngram_range;
        if self.tfidf.max_features == 0 || lo == 0 || lo > hi || hi > 8 {
            return Err(Error::InvalidConfig("tfidf needs max_features >= 1 and 1 <= n_min <= n_max <= 8".into()));
        }
        if self.sequence.max_len == 0 || self.sequence.max_len > MAX_SEQ_LEN {
            return Err(Error::InvalidConfig(format!("sequence.max_len must be in 1..={MAX_SEQ_LEN}")));
        }
        if let CorpusSource::Synthetic(s) = &self.corpus {
            s.validate()?;
        }
        for space in self.search.values() {
            space.validate()?;
        }
        Ok(())
    }

    pub fn space_for(&self, family: ModelFamily) -> SearchSpace {
        self.search.get(&family).cloned().unwrap_or_else(|| default_space(family))
    }

    /// Applies `key=value` overrides. Known top-level keys are `seed`,
    /// `stratified`, `fixed_clock`, `parallel`, `tfidf.max_features`,
    /// `sequence.max_len` and `sequence.min_freq`.
    pub fn apply_override(&mut self, key: &str, raw: &str) -> Result<()> {
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let as_u64 = || value.as_u64().ok_or_else(|| Error::InvalidConfig(format!("override `{key}` needs a non-negative integer")));
        let as_bool = || value.as_bool().ok_or_else(|| Error::InvalidConfig(format!("override `{key}` needs true/false")));
        match key {
            "seed" => self.seed = as_u64()?,
            "stratified" => self.stratified = as_bool()?,
            "fixed_clock" => self.fixed_clock = as_bool()?,
            "parallel" => self.parallel = as_bool()?,
            "tfidf.max_features" => self.tfidf.max_features = as_u64()? as usize,
            "sequence.max_len" => self.sequence.max_len = as_u64()? as usize,
            "sequence.min_freq" => self.sequence.min_freq = as_u64()? as usize,
            _ => return Err(Error::InvalidConfig(format!("unknown override `{key}`"))),
        }
        self.overrides.insert(key.to_string(), value);
        self.validate()
    }
}

fn values(v: &[Value]) -> Vec<Value> {
    v.to_vec()
}

/// Default spaces: C in {0.1, 1, 10} and class_weight in {balanced, none}
/// for the linear models; SVM kernels {linear, rbf} with gamma {scale, auto}
/// for rbf; forests over n_estimators {50, 100, 200} and max_depth
/// {10, 20, unbounded}; boosting over learning rate, leaves and child size;
/// GRU by 10 random draws over its dimension, rate and epoch ranges.
pub fn default_space(family: ModelFamily) -> SearchSpace {
    let c = Axis::grid("C", values(&[json!(0.1), json!(1), json!(10)]));
    let cw = Axis::grid("class_weight", values(&[json!("balanced"), json!("none")]));
    match family {
        ModelFamily::Logistic => SearchSpace::grid(vec![c, cw]),
        ModelFamily::Svm => SearchSpace {
            strategy: Strategy::Grid,
            grids: vec![
                vec![Axis::grid("kernel", vec![json!("linear")]), c.clone(), cw.clone()],
                vec![
                    Axis::grid("kernel", vec![json!("rbf")]),
                    c,
                    cw,
                    Axis::grid("gamma", values(&[json!("scale"), json!("auto")])),
                ],
            ],
        },
        ModelFamily::Rf => SearchSpace::grid(vec![
            Axis::grid("n_estimators", values(&[json!(50), json!(100), json!(200)])),
            Axis::grid("max_depth", values(&[json!(10), json!(20), Value::Null])),
            Axis::grid("min_samples_split", values(&[json!(2), json!(5)])),
            Axis::grid("min_samples_leaf", values(&[json!(1), json!(2)])),
            cw,
        ]),
        ModelFamily::Gbdt => SearchSpace::grid(vec![
            Axis::grid("n_estimators", vec![json!(100)]),
            Axis::grid("learning_rate", values(&[json!(0.05), json!(0.1)])),
            Axis::grid("max_depth", vec![json!(-1)]),
            Axis::grid("num_leaves", values(&[json!(31), json!(50), json!(63)])),
            Axis::grid("min_child_samples", values(&[json!(10), json!(20)])),
            cw,
        ]),
        ModelFamily::Gru => SearchSpace {
            strategy: Strategy::Random { n_trials: 10 },
            grids: vec![vec![
                Axis::range("embedding_dim", 150.0, 250.0, Law::Integer),
                Axis::range("hidden_dim", 256.0, 768.0, Law::Integer),
                Axis::range("lr", 1e-4, 1e-3, Law::LogUniform),
                Axis::range("epochs", 5.0, 10.0, Law::Integer),
            ]],
        },
    }
}

fn params(v: Value) -> ParamSet {
    serde_json::from_value(v).expect("preset literal is an object")
}

/// Best configurations reported for the original study, by scheme and
/// family. Binary logistic regression ships twice: the table lists
/// `class_weight: None` while the accompanying text says the best runs used
/// `balanced`; `preset_variants` returns both.
pub fn preset_variants(scheme: SchemeKind, family: ModelFamily) -> Vec<(String, ParamSet)> {
    use ModelFamily::*;
    use SchemeKind::*;
    let one = |name: &str, v: Value| vec![(name.to_string(), params(v))];
    match (scheme, family) {
        (Binary, Logistic) => vec![
            ("table".into(), params(json!({"C": 10, "solver": "liblinear", "penalty": "l2", "class_weight": "none"}))),
            ("balanced".into(), params(json!({"C": 10, "solver": "liblinear", "penalty": "l2", "class_weight": "balanced"}))),
        ],
        (Multiclass, Logistic) => one(
            "table",
            json!({"C": 10, "solver": "lbfgs", "penalty": "l2", "multi_class": "multinomial", "class_weight": "balanced"}),
        ),
        (_, Svm) => one("table", json!({"C": 1, "kernel": "rbf", "class_weight": "balanced", "gamma": "scale"})),
        (Binary, Rf) => one(
            "table",
            json!({"n_estimators": 100, "max_depth": null, "min_samples_split": 5, "min_samples_leaf": 1, "class_weight": "balanced"}),
        ),
        (Multiclass, Rf) => one(
            "table",
            json!({"n_estimators": 200, "max_depth": null, "min_samples_split": 2, "min_samples_leaf": 2, "class_weight": "balanced"}),
        ),
        (Binary, Gbdt) => one(
            "table",
            json!({"n_estimators": 100, "learning_rate": 0.1, "max_depth": -1, "num_leaves": 50, "min_child_samples": 10, "class_weight": "none"}),
        ),
        (Multiclass, Gbdt) => one(
            "table",
            json!({"n_estimators": 100, "learning_rate": 0.1, "max_depth": null, "num_leaves": 63, "class_weight": "balanced"}),
        ),
        (Binary, Gru) => one("table", json!({"embedding_dim": 156, "hidden_dim": 467, "lr": 0.0004, "epochs": 5})),
        (Multiclass, Gru) => one("table", json!({"embedding_dim": 236, "hidden_dim": 730, "lr": 0.0003, "epochs": 6})),
    }
}

/// The first preset variant of a family.
pub fn preset(scheme: SchemeKind, family: ModelFamily) -> ParamSet {
    preset_variants(scheme, family).remove(0).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::search::expand_grid;

    #[test]
    fn default_grid_sizes() {
        assert_eq!(expand_grid(&default_space(ModelFamily::Logistic)).unwrap().len(), 6);
        assert_eq!(expand_grid(&default_space(ModelFamily::Svm)).unwrap().len(), 18);
        assert_eq!(expand_grid(&default_space(ModelFamily::Rf)).unwrap().len(), 72);
        assert_eq!(expand_grid(&default_space(ModelFamily::Gbdt)).unwrap().len(), 24);
        assert!(expand_grid(&default_space(ModelFamily::Gru)).is_err());
        let draws = default_space(ModelFamily::Gru).configurations(1).unwrap();
        assert_eq!(draws.len(), 10);
    }

    #[test]
    fn binary_logistic_ships_both_presets() {
        let v = preset_variants(SchemeKind::Binary, ModelFamily::Logistic);
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].1["class_weight"], json!("none"));
        assert_eq!(v[1].1["class_weight"], json!("balanced"));
        assert_eq!(preset(SchemeKind::Multiclass, ModelFamily::Gbdt)["num_leaves"], json!(63));
    }

    #[test]
    fn config_round_trip_and_version_check() {
        let mut c = ExperimentConfig::new(CorpusSource::Csv("data.csv".into()), SchemeKind::Binary, 7);
        c.apply_override("seed", "11").unwrap();
        assert_eq!(c.seed, 11);
        assert_eq!(c.overrides["seed"], json!(11));
        assert!(c.apply_override("nope", "1").is_err());
        let back = ExperimentConfig::from_json(c.to_json().as_bytes()).unwrap();
        assert_eq!(back, c);
        let mut v: Value = serde_json::from_str(&c.to_json()).unwrap();
        v["schema_version"] = json!(99);
        assert!(ExperimentConfig::from_json(v.to_string().as_bytes()).is_err());
        let minimal = r#"{"schema_version":1,"corpus":{"csv":"x.csv"},"scheme":"multiclass","seed":3}"#;
        let m = ExperimentConfig::from_json(minimal.as_bytes()).unwrap();
        assert!(m.parallel && !m.fixed_clock);
        assert_eq!(m.tfidf.max_features, 1000);
    }
}
