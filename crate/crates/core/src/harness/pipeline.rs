//! Corpus preparation, featurization, model construction from parameter
//! sets, trial execution and model bundles.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use once_cell::sync::OnceCell;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{CorpusSource, ExperimentConfig, ModelFamily, SCHEMA_VERSION};
use super::report::ClassDistribution;
use super::search::{select_best, ParamSet};
use super::synthetic;
use crate::corpus::{load_csv, prepare_documents, split_dataset, split_dataset_stratified, DatasetSplit, Document, LabelScheme, LoadedCorpus, SchemeKind, SplitManifest};
use crate::error::{Error, Result};
use crate::features::{self, SparseVector, TfIdfModel};
use crate::gru::{self, GruParams, GruTrainConfig, SeqVocabulary};
use crate::linear::{self, argmax, LinearModelParams, LogisticConfig};
use crate::matrix::DenseMatrix;
use crate::metrics::{evaluate, weighted_f1, EvaluationReport};
use crate::seeds::{child_seed, Stream};
use crate::svm::{fit_svm, Gamma, KernelSpec, SvmConfig, SvmModel};
use crate::trees::{fit_forest, fit_gbdt, ForestModel, GbdtModel, TreeConfig};
use crate::{ClassWeightMode, LabelId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Validation,
    Test,
}

impl SplitName {
    pub fn parse(s: &str) -> Result<SplitName> {
        match s {
            "train" => Ok(SplitName::Train),
            "validation" | "val" => Ok(SplitName::Validation),
            "test" => Ok(SplitName::Test),
            _ => Err(Error::InvalidConfig(format!("unknown split `{s}`"))),
        }
    }
}

pub fn load_records(config: &ExperimentConfig) -> Result<LoadedCorpus> {
    match &config.corpus {
        CorpusSource::Csv(path) => load_csv(path),
        CorpusSource::Synthetic(spec) => Ok(LoadedCorpus {
            records: synthetic::generate(spec)?,
            dropped_empty: 0,
        }),
    }
}

pub fn label_scheme(config: &ExperimentConfig, loaded: &LoadedCorpus) -> Result<LabelScheme> {
    match (config.scheme, &config.classes) {
        (SchemeKind::Binary, _) => Ok(LabelScheme::binary()),
        (SchemeKind::Multiclass, Some(names)) => LabelScheme::multiclass(names),
        (SchemeKind::Multiclass, None) => LabelScheme::from_records(&loaded.records),
    }
}

/// Cleaned, labelled documents and their split.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub scheme: LabelScheme,
    pub documents: Vec<Document>,
    pub split: DatasetSplit,
    pub dropped_empty: usize,
    pub stratified: bool,
}

impl PreparedCorpus {
    pub fn indices(&self, split: SplitName) -> &[usize] {
        match split {
            SplitName::Train => &self.split.train,
            SplitName::Validation => &self.split.validation,
            SplitName::Test => &self.split.test,
        }
    }

    pub fn tokens(&self, split: SplitName) -> Vec<&[String]> {
        self.indices(split).iter().map(|&i| self.documents[i].tokens.as_slice()).collect()
    }

    pub fn labels(&self, split: SplitName) -> Vec<LabelId> {
        self.indices(split).iter().map(|&i| self.documents[i].label).collect()
    }

    pub fn manifest(&self) -> SplitManifest {
        SplitManifest {
            n_documents: self.documents.len(),
            dropped_empty: self.dropped_empty,
            stratified: self.stratified,
            split: self.split.clone(),
        }
    }

    pub fn distribution(&self) -> ClassDistribution {
        let labels: Vec<LabelId> = self.documents.iter().map(|d| d.label).collect();
        ClassDistribution::from_labels(&self.scheme.names, &labels)
    }
}

/// Loads, cleans, labels and splits the configured corpus.
pub fn prepare(config: &ExperimentConfig) -> Result<PreparedCorpus> {
    config.validate()?;
    let loaded = load_records(config)?;
    if loaded.records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let scheme = label_scheme(config, &loaded)?;
    let documents = prepare_documents(&loaded.records, &scheme, &config.clean)?;
    let seed = config.seed;
    let split = if config.stratified {
        let labels: Vec<LabelId> = documents.iter().map(|d| d.label).collect();
        split_dataset_stratified(&labels, seed)?
    } else {
        split_dataset(documents.len(), seed)?
    };
    Ok(PreparedCorpus {
        scheme,
        documents,
        split,
        dropped_empty: loaded.dropped_empty,
        stratified: config.stratified,
    })
}

/// Per-split model inputs. TF-IDF and the sequence vocabulary are fitted on
/// the training split only.
pub struct Features {
    pub n_classes: usize,
    pub tfidf: TfIdfModel,
    pub vocabulary: SeqVocabulary,
    tfidf_rows: [Vec<SparseVector>; 3],
    sequences: [Vec<Vec<usize>>; 3],
    labels: [Vec<LabelId>; 3],
    dense_train: OnceCell<DenseMatrix>,
}

fn slot(split: SplitName) -> usize {
    split as usize
}

impl Features {
    pub fn build(corpus: &PreparedCorpus, config: &ExperimentConfig) -> Result<Features> {
        let train_tokens = corpus.tokens(SplitName::Train);
        let tfidf = features::fit(&train_tokens, &config.tfidf)?;
        let vocabulary = SeqVocabulary::build(&train_tokens, config.sequence.min_freq, config.sequence.max_len);
        let splits = [SplitName::Train, SplitName::Validation, SplitName::Test];
        let tfidf_rows = splits.map(|s| tfidf.transform_all(&corpus.tokens(s)));
        let sequences = splits.map(|s| corpus.tokens(s).iter().map(|t| vocabulary.encode(t)).collect());
        let labels = splits.map(|s| corpus.labels(s));
        Ok(Features {
            n_classes: corpus.scheme.n_classes(),
            tfidf,
            vocabulary,
            tfidf_rows,
            sequences,
            labels,
            dense_train: OnceCell::new(),
        })
    }

    pub fn rows(&self, split: SplitName) -> &[SparseVector] {
        &self.tfidf_rows[slot(split)]
    }

    pub fn sequences(&self, split: SplitName) -> &[Vec<usize>] {
        &self.sequences[slot(split)]
    }

    pub fn labels(&self, split: SplitName) -> &[LabelId] {
        &self.labels[slot(split)]
    }

    pub fn dense_train(&self) -> &DenseMatrix {
        self.dense_train.get_or_init(|| {
            DenseMatrix::from_sparse(self.rows(SplitName::Train), self.tfidf.dim()).expect("rows share the vocabulary dimension")
        })
    }
}

/// Typed training configuration of one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Logistic(LogisticConfig),
    Svm(SvmConfig),
    Rf(TreeConfig),
    Gbdt(TreeConfig),
    Gru(GruTrainConfig),
}

struct Reader<'a> {
    params: &'a ParamSet,
    used: HashSet<&'static str>,
}

impl<'a> Reader<'a> {
    fn get(&mut self, key: &'static str) -> Option<&'a Value> {
        self.used.insert(key);
        self.params.get(key)
    }

    fn bad(key: &str, v: &Value, want: &str) -> Error {
        Error::InvalidConfig(format!("parameter `{key}` = {v} is not {want}"))
    }

    fn f64(&mut self, key: &'static str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| Self::bad(key, v, "a number")),
        }
    }

    fn usize(&mut self, key: &'static str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .or_else(|| v.as_f64().filter(|x| x.fract() == 0.0 && *x >= 0.0).map(|x| x as u64))
                .map(|x| x as usize)
                .ok_or_else(|| Self::bad(key, v, "a non-negative integer")),
        }
    }

    fn str(&mut self, key: &'static str) -> Result<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.as_str().map(Some).ok_or_else(|| Self::bad(key, v, "a string")),
        }
    }

    /// `null`, a negative integer or absence mean unbounded.
    fn depth(&mut self, key: &'static str) -> Result<Option<usize>> {
        match self.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => match v.as_i64() {
                Some(d) if d < 0 => Ok(None),
                Some(d) => Ok(Some(d as usize)),
                None => Err(Self::bad(key, v, "an integer or null")),
            },
        }
    }

    fn class_weight(&mut self) -> Result<ClassWeightMode> {
        match self.get("class_weight") {
            None | Some(Value::Null) => Ok(ClassWeightMode::None),
            Some(Value::String(s)) if s.eq_ignore_ascii_case("none") => Ok(ClassWeightMode::None),
            Some(Value::String(s)) if s == "balanced" => Ok(ClassWeightMode::Balanced),
            Some(v) => Err(Self::bad("class_weight", v, "`balanced` or `none`")),
        }
    }

    fn finish(self) -> Result<()> {
        let unknown: Vec<&String> = self.params.keys().filter(|k| !self.used.contains(k.as_str())).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("unknown parameters {unknown:?}")))
        }
    }
}

/// Translates a parameter set into a training configuration. Unknown keys
/// are rejected. For logistic regression `solver`, `penalty` (only `l2`) and
/// `multi_class` are accepted for provenance; a single optimizer serves
/// every solver name.
pub fn model_spec(family: ModelFamily, params: &ParamSet, seed: u64) -> Result<ModelSpec> {
    let mut r = Reader { params, used: HashSet::new() };
    let spec = match family {
        ModelFamily::Logistic => {
            let _ = r.str("solver")?;
            let _ = r.str("multi_class")?;
            if let Some(p) = r.str("penalty")? {
                if p != "l2" {
                    return Err(Error::InvalidConfig(format!("penalty `{p}` is not supported (only l2)")));
                }
            }
            let d = LogisticConfig::default();
            ModelSpec::Logistic(LogisticConfig {
                c: r.f64("C", d.c)?,
                class_weight: r.class_weight()?,
                max_iter: r.usize("max_iter", d.max_iter)?,
                tol: r.f64("tol", d.tol)?,
            })
        }
        ModelFamily::Svm => {
            let kernel_name = r.str("kernel")?.unwrap_or("rbf");
            let gamma = match r.get("gamma") {
                None => Gamma::Scale,
                Some(Value::String(s)) if s == "scale" => Gamma::Scale,
                Some(Value::String(s)) if s == "auto" => Gamma::Auto,
                Some(v) => Gamma::Value(v.as_f64().filter(|g| *g > 0.0).ok_or_else(|| Reader::bad("gamma", v, "scale, auto or a positive number"))?),
            };
            let degree = r.usize("degree", 3)? as u32;
            let coef0 = r.f64("coef0", 0.0)?;
            let alpha = r.f64("alpha", 1.0)?;
            let kernel = match kernel_name {
                "linear" => KernelSpec::linear(),
                "rbf" => KernelSpec::rbf(gamma),
                "poly" | "polynomial" => KernelSpec::polynomial(degree, coef0),
                "sigmoid" => KernelSpec::sigmoid(alpha, coef0),
                other => return Err(Error::InvalidConfig(format!("unknown kernel `{other}`"))),
            };
            let d = SvmConfig::default();
            ModelSpec::Svm(SvmConfig {
                c: r.f64("C", d.c)?,
                kernel,
                class_weight: r.class_weight()?,
                epochs: r.usize("epochs", d.epochs)?,
                tol: r.f64("tol", d.tol)?,
                seed,
            })
        }
        ModelFamily::Rf | ModelFamily::Gbdt => {
            let d = TreeConfig::default();
            let c = TreeConfig {
                criterion: match r.str("criterion")? {
                    None | Some("gini") => crate::trees::Criterion::Gini,
                    Some("entropy") => crate::trees::Criterion::Entropy,
                    Some(o) => return Err(Error::InvalidConfig(format!("unknown criterion `{o}`"))),
                },
                max_depth: r.depth("max_depth")?,
                min_samples_split: r.usize("min_samples_split", d.min_samples_split)?,
                min_samples_leaf: r.usize("min_samples_leaf", d.min_samples_leaf)?,
                class_weight: r.class_weight()?,
                n_estimators: r.usize("n_estimators", d.n_estimators)?,
                bootstrap: match r.get("bootstrap") {
                    None => true,
                    Some(v) => v.as_bool().ok_or_else(|| Reader::bad("bootstrap", v, "a boolean"))?,
                },
                max_features: match r.get("max_features") {
                    None | Some(Value::Null) => None,
                    Some(v) => Some(v.as_u64().ok_or_else(|| Reader::bad("max_features", v, "an integer"))? as usize),
                },
                learning_rate: r.f64("learning_rate", d.learning_rate)?,
                num_leaves: r.usize("num_leaves", d.num_leaves)?,
                min_child_samples: r.usize("min_child_samples", d.min_child_samples)?,
            };
            c.validate()?;
            if family == ModelFamily::Rf {
                ModelSpec::Rf(c)
            } else {
                ModelSpec::Gbdt(c)
            }
        }
        ModelFamily::Gru => {
            let d = GruTrainConfig::default();
            let lr = match r.get("learning_rate") {
                Some(v) => v.as_f64().ok_or_else(|| Reader::bad("learning_rate", v, "a number"))?,
                None => r.f64("lr", d.learning_rate)?,
            };
            ModelSpec::Gru(GruTrainConfig {
                embedding_dim: r.usize("embedding_dim", d.embedding_dim)?,
                hidden_dim: r.usize("hidden_dim", d.hidden_dim)?,
                learning_rate: lr,
                epochs: r.usize("epochs", d.epochs)?,
                batch_size: r.usize("batch_size", d.batch_size)?,
                dropout: r.f64("dropout", d.dropout)?,
                class_weight: match r.get("class_weight") {
                    None => d.class_weight,
                    Some(_) => {
                        r.used.remove("class_weight");
                        r.class_weight()?
                    }
                },
                seed,
            })
        }
    };
    r.finish()?;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FittedModel {
    Logistic(LinearModelParams),
    Svm(SvmModel),
    Rf(ForestModel),
    Gbdt(GbdtModel),
    Gru(GruParams),
}

impl FittedModel {
    pub fn family(&self) -> ModelFamily {
        match self {
            FittedModel::Logistic(_) => ModelFamily::Logistic,
            FittedModel::Svm(_) => ModelFamily::Svm,
            FittedModel::Rf(_) => ModelFamily::Rf,
            FittedModel::Gbdt(_) => ModelFamily::Gbdt,
            FittedModel::Gru(_) => ModelFamily::Gru,
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            FittedModel::Logistic(p) => p.n_classes(),
            FittedModel::Svm(m) => m.n_classes,
            FittedModel::Rf(m) => m.n_classes,
            FittedModel::Gbdt(m) => m.n_classes,
            FittedModel::Gru(p) => p.dims.n_classes,
        }
    }

    /// Per-class scores of one TF-IDF row (all families but the GRU).
    pub fn scores_tfidf(&self, x: &SparseVector) -> Result<Vec<f64>> {
        match self {
            FittedModel::Logistic(p) => linear::predict_proba(p, x),
            FittedModel::Svm(m) => m.class_scores(x),
            FittedModel::Rf(m) => Ok(m.class_scores(&dense_row(x, m.n_features)?)),
            FittedModel::Gbdt(m) => Ok(m.predict_proba(&dense_row(x, m.n_features)?)),
            FittedModel::Gru(_) => Err(Error::InvalidModel("GRU models score token sequences".into())),
        }
    }

    /// Predicted class of one TF-IDF row. Forests and SVMs use their vote
    /// rules; the others take the highest score.
    pub fn predict_tfidf(&self, x: &SparseVector) -> Result<LabelId> {
        match self {
            FittedModel::Svm(m) => m.predict(x),
            FittedModel::Rf(m) => Ok(m.predict(&dense_row(x, m.n_features)?)),
            _ => Ok(argmax(&self.scores_tfidf(x)?)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FittedModel::Logistic(p) => p.validate(),
            FittedModel::Svm(m) => m.validate(),
            FittedModel::Rf(m) => m.validate(),
            FittedModel::Gbdt(m) => m.validate(),
            FittedModel::Gru(p) => p.validate(),
        }
    }

    /// Input width the model expects: TF-IDF dimension or GRU vocabulary size.
    fn input_width(&self) -> usize {
        match self {
            FittedModel::Logistic(p) => p.n_features,
            FittedModel::Svm(m) => m.n_features,
            FittedModel::Rf(m) => m.n_features,
            FittedModel::Gbdt(m) => m.n_features,
            FittedModel::Gru(p) => p.dims.vocab_size,
        }
    }
}

fn dense_row(x: &SparseVector, dim: usize) -> Result<Vec<f64>> {
    if x.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x.dim() });
    }
    Ok(x.to_dense())
}

/// Predictions and per-class scores for a whole split.
pub fn predict_split(model: &FittedModel, features: &Features, split: SplitName) -> Result<(Vec<LabelId>, Vec<Vec<f64>>)> {
    let scored: Vec<(LabelId, Vec<f64>)> = match model {
        FittedModel::Gru(p) => features
            .sequences(split)
            .par_iter()
            .map(|s| gru::predict_proba(s, p).map(|pr| (argmax(&pr), pr)))
            .collect::<Result<_>>()?,
        _ => features
            .rows(split)
            .par_iter()
            .map(|x| Ok((model.predict_tfidf(x)?, model.scores_tfidf(x)?)))
            .collect::<Result<_>>()?,
    };
    Ok(scored.into_iter().unzip())
}

/// Fits one model on the training split.
pub fn fit_model(spec: &ModelSpec, features: &Features, seed: u64) -> Result<FittedModel> {
    let k = features.n_classes;
    let x = features.rows(SplitName::Train);
    let y = features.labels(SplitName::Train);
    Ok(match spec {
        ModelSpec::Logistic(c) => FittedModel::Logistic(linear::fit_logistic(x, y, k, c)?.params),
        ModelSpec::Svm(c) => FittedModel::Svm(fit_svm(x, y, k, c)?),
        ModelSpec::Rf(c) => FittedModel::Rf(fit_forest(features.dense_train(), y, k, c, seed)?),
        ModelSpec::Gbdt(c) => FittedModel::Gbdt(fit_gbdt(features.dense_train(), y, k, c, seed)?),
        ModelSpec::Gru(c) => FittedModel::Gru(
            gru::train(
                features.sequences(SplitName::Train),
                y,
                features.sequences(SplitName::Validation),
                features.labels(SplitName::Validation),
                features.vocabulary.len(),
                k,
                c,
            )?
            .params,
        ),
    })
}

/// Seed of trial `t` of a family: `child_seed(seed, Trial, family * 2^16 + t)`.
pub fn trial_seed(root: u64, family: ModelFamily, trial: usize) -> u64 {
    child_seed(root, Stream::Trial, (family.index() << 16) + trial as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub params: ParamSet,
    pub seed: u64,
    pub validation_weighted_f1: Option<f64>,
    pub error: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Ok,
    NoSuccessfulTrials,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub schema_version: u32,
    pub status: SearchStatus,
    pub family: ModelFamily,
    pub class_names: Vec<String>,
    /// Resolved experiment configuration, for provenance.
    pub experiment: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub best_index: Option<usize>,
    pub best_params: Option<ParamSet>,
    pub validation_weighted_f1: Option<f64>,
    /// Test-set evaluation of the refitted best configuration.
    pub test: Option<EvaluationReport>,
    pub distribution: ClassDistribution,
}

impl SearchResult {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let r: SearchResult = serde_json::from_slice(bytes)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!("unsupported result schema_version {}", r.schema_version)));
        }
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

/// Everything needed to score new text with a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub schema_version: u32,
    pub family: ModelFamily,
    pub params: ParamSet,
    pub seed: u64,
    pub scheme: LabelScheme,
    pub experiment: ExperimentConfig,
    /// Present for every family except the GRU.
    pub tfidf: Option<TfIdfModel>,
    /// Present for the GRU only.
    pub vocabulary: Option<SeqVocabulary>,
    pub model: FittedModel,
}

impl ModelBundle {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundle serializes")
    }

    /// Decodes and cross-checks a bundle: versions, label scheme, model
    /// structure and the input width against the bundled preprocessing.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let mut b: ModelBundle = serde_json::from_slice(bytes)?;
        if b.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidModel(format!("unsupported bundle schema_version {}", b.schema_version)));
        }
        b.experiment.validate()?;
        b.scheme.validate()?;
        b.model.validate()?;
        if b.model.family() != b.family || b.model.n_classes() != b.scheme.n_classes() {
            return Err(Error::InvalidModel("bundle family or class count disagrees with its model".into()));
        }
        let width = match (&b.model, &b.tfidf, b.vocabulary.take()) {
            (FittedModel::Gru(_), None, Some(v)) => {
                let v = v.reindex()?;
                let n = v.len();
                b.vocabulary = Some(v);
                n
            }
            (FittedModel::Gru(_), _, _) => return Err(Error::InvalidModel("GRU bundle needs a vocabulary and no TF-IDF".into())),
            (_, Some(t), None) => t.dim(),
            _ => return Err(Error::InvalidModel("bundle needs a TF-IDF model and no vocabulary".into())),
        };
        if width != b.model.input_width() {
            return Err(Error::DimensionMismatch { expected: width, got: b.model.input_width() });
        }
        Ok(b)
    }

    /// Predictions and scores for already-normalized token lists.
    pub fn predict_tokens(&self, docs: &[&[String]]) -> Result<(Vec<LabelId>, Vec<Vec<f64>>)> {
        let scored: Vec<(LabelId, Vec<f64>)> = match (&self.model, &self.tfidf, &self.vocabulary) {
            (FittedModel::Gru(p), _, Some(v)) => docs
                .par_iter()
                .map(|d| gru::predict_proba(&v.encode(d), p).map(|pr| (argmax(&pr), pr)))
                .collect::<Result<_>>()?,
            (m, Some(t), _) => docs
                .par_iter()
                .map(|d| {
                    let x = t.transform(d);
                    Ok((m.predict_tfidf(&x)?, m.scores_tfidf(&x)?))
                })
                .collect::<Result<_>>()?,
            _ => return Err(Error::InvalidModel("bundle lacks its preprocessing".into())),
        };
        Ok(scored.into_iter().unzip())
    }

    /// Re-prepares the bundled experiment's corpus and evaluates one split.
    pub fn evaluate_split(&self, split: SplitName) -> Result<EvaluationReport> {
        let corpus = prepare(&self.experiment)?;
        if corpus.scheme != self.scheme {
            return Err(Error::InvalidModel("corpus label scheme differs from the bundle's".into()));
        }
        let (pred, scores) = self.predict_tokens(&corpus.tokens(split))?;
        evaluate(&corpus.labels(split), &pred, &scores, self.scheme.n_classes())
    }
}

fn run_trial(family: ModelFamily, params: &ParamSet, seed: u64, features: &Features) -> Result<(FittedModel, f64)> {
    let spec = model_spec(family, params, seed)?;
    let model = fit_model(&spec, features, seed)?;
    let (pred, _) = predict_split(&model, features, SplitName::Validation)?;
    let f1 = weighted_f1(features.labels(SplitName::Validation), &pred, features.n_classes)?;
    Ok((model, f1))
}

/// Searches one family: every configuration is fitted on train and scored
/// by validation weighted F1; the best (earliest on ties) is refitted with
/// its trial seed and evaluated once on test. Failed trials are logged and
/// skipped; if all fail the result carries `NoSuccessfulTrials`.
pub fn run_search(config: &ExperimentConfig, family: ModelFamily, corpus: &PreparedCorpus, features: &Features) -> Result<(SearchResult, Option<ModelBundle>)> {
    let space = config.space_for(family);
    let configs = space.configurations(child_seed(config.seed, Stream::Sampling, family.index()))?;
    run_configurations(config, family, configs, corpus, features)
}

/// [`run_search`] over an explicit list of configurations.
pub fn run_configurations(
    config: &ExperimentConfig,
    family: ModelFamily,
    configs: Vec<ParamSet>,
    corpus: &PreparedCorpus,
    features: &Features,
) -> Result<(SearchResult, Option<ModelBundle>)> {
    let one = |(t, params): (usize, &ParamSet)| {
        let seed = trial_seed(config.seed, family, t);
        let start = Instant::now();
        let outcome = run_trial(family, params, seed, features);
        let seconds = if config.fixed_clock { 0.0 } else { start.elapsed().as_secs_f64() };
        let (f1, error) = match outcome {
            Ok((_, f1)) => (Some(f1), None),
            Err(e) => (None, Some(e.to_string())),
        };
        TrialRecord {
            index: t,
            params: params.clone(),
            seed,
            validation_weighted_f1: f1,
            error,
            seconds,
        }
    };
    let trials: Vec<TrialRecord> = if config.parallel {
        configs.par_iter().enumerate().map(one).collect()
    } else {
        configs.iter().enumerate().map(one).collect()
    };
    let scores: Vec<Option<f64>> = trials.iter().map(|t| t.validation_weighted_f1).collect();
    let best_index = select_best(&scores);
    let mut result = SearchResult {
        schema_version: SCHEMA_VERSION,
        status: SearchStatus::NoSuccessfulTrials,
        family,
        class_names: corpus.scheme.names.clone(),
        experiment: config.clone(),
        trials,
        best_index,
        best_params: None,
        validation_weighted_f1: None,
        test: None,
        distribution: corpus.distribution(),
    };
    let Some(b) = best_index else { return Ok((result, None)) };
    let best = result.trials[b].clone();
    let (model, _) = run_trial(family, &best.params, best.seed, features)?;
    let (pred, scores) = predict_split(&model, features, SplitName::Test)?;
    result.test = Some(evaluate(features.labels(SplitName::Test), &pred, &scores, features.n_classes)?);
    result.status = SearchStatus::Ok;
    result.best_params = Some(best.params.clone());
    result.validation_weighted_f1 = best.validation_weighted_f1;
    let bundle = ModelBundle {
        schema_version: SCHEMA_VERSION,
        family,
        params: best.params,
        seed: best.seed,
        scheme: corpus.scheme.clone(),
        experiment: config.clone(),
        tfidf: (family != ModelFamily::Gru).then(|| features.tfidf.clone()),
        vocabulary: (family == ModelFamily::Gru).then(|| features.vocabulary.clone()),
        model,
    };
    Ok((result, Some(bundle)))
}

/// Trains a single configuration (no search) and evaluates it on test.
pub fn train_single(config: &ExperimentConfig, family: ModelFamily, params: ParamSet, corpus: &PreparedCorpus, features: &Features) -> Result<(SearchResult, Option<ModelBundle>)> {
    run_configurations(config, family, vec![params], corpus, features)
}

/// Trial, success and failure counts.
pub fn trial_counts(result: &SearchResult) -> BTreeMap<&'static str, usize> {
    let ok = result.trials.iter().filter(|t| t.error.is_none()).count();
    BTreeMap::from([("trials", result.trials.len()), ("succeeded", ok), ("failed", result.trials.len() - ok)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::preset_variants;
    use crate::harness::search::{Axis, SearchSpace};
    use crate::harness::synthetic::SyntheticSpec;
    use serde_json::json;

    fn small_config(seed: u64) -> ExperimentConfig {
        let spec = SyntheticSpec {
            n_docs: 300,
            ..SyntheticSpec::default()
        };
        let mut c = ExperimentConfig::new(CorpusSource::Synthetic(spec), SchemeKind::Binary, seed);
        c.tfidf.max_features = 300;
        c.fixed_clock = true;
        c
    }

    fn ps(v: Value) -> ParamSet {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn every_preset_parses() {
        for scheme in [SchemeKind::Binary, SchemeKind::Multiclass] {
            for family in ModelFamily::ALL {
                for (_, p) in preset_variants(scheme, family) {
                    model_spec(family, &p, 1).unwrap_or_else(|e| panic!("{family:?} {p:?}: {e}"));
                }
            }
        }
    }

    #[test]
    fn unknown_and_malformed_parameters_rejected() {
        assert!(model_spec(ModelFamily::Logistic, &ps(json!({"C": 1, "bogus": 2})), 0).is_err());
        assert!(model_spec(ModelFamily::Logistic, &ps(json!({"penalty": "l1"})), 0).is_err());
        assert!(model_spec(ModelFamily::Svm, &ps(json!({"kernel": "cubic"})), 0).is_err());
        assert!(model_spec(ModelFamily::Svm, &ps(json!({"gamma": -1.0})), 0).is_err());
        assert!(model_spec(ModelFamily::Rf, &ps(json!({"n_estimators": "many"})), 0).is_err());
        assert!(model_spec(ModelFamily::Gru, &ps(json!({"class_weight": "sometimes"})), 0).is_err());
    }

    #[test]
    fn depth_conventions() {
        for (raw, want) in [(json!(null), None), (json!(-1), None), (json!(7), Some(7))] {
            match model_spec(ModelFamily::Gbdt, &ps(json!({ "max_depth": raw })), 0).unwrap() {
                ModelSpec::Gbdt(c) => assert_eq!(c.max_depth, want),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn gru_keys_map_to_training_config() {
        let spec = model_spec(ModelFamily::Gru, &ps(json!({"embedding_dim": 156, "hidden_dim": 467, "lr": 0.0004, "epochs": 5})), 9).unwrap();
        let ModelSpec::Gru(c) = spec else { panic!() };
        assert_eq!((c.embedding_dim, c.hidden_dim, c.epochs, c.seed), (156, 467, 5, 9));
        assert_eq!(c.learning_rate, 0.0004);
    }

    #[test]
    fn tfidf_fitted_on_train_only() {
        let config = small_config(3);
        let corpus = prepare(&config).unwrap();
        let features = Features::build(&corpus, &config).unwrap();
        assert_eq!(features.tfidf.n_docs(), corpus.split.train.len());
    }

    #[test]
    fn search_is_deterministic_and_bundles_round_trip() {
        let mut config = small_config(11);
        config.search.insert(
            ModelFamily::Logistic,
            SearchSpace::grid(vec![Axis::grid("C", vec![json!(0.1), json!(10)]), Axis::grid("class_weight", vec![json!("balanced")])]),
        );
        let corpus = prepare(&config).unwrap();
        let features = Features::build(&corpus, &config).unwrap();
        let (a, bundle) = run_search(&config, ModelFamily::Logistic, &corpus, &features).unwrap();
        let mut serial = config.clone();
        serial.parallel = false;
        let (b, _) = run_search(&serial, ModelFamily::Logistic, &corpus, &features).unwrap();
        assert_eq!(a.trials, b.trials);
        assert_eq!(a.test, b.test);
        assert_eq!(a.status, SearchStatus::Ok);
        assert_eq!(a.trials.len(), 2);
        assert_eq!(a.trials.iter().map(|t| t.index).collect::<Vec<_>>(), vec![0, 1]);

        let round = SearchResult::from_json(a.to_json().as_bytes()).unwrap();
        assert_eq!(round.to_json(), a.to_json());

        let bundle = bundle.unwrap();
        let decoded = ModelBundle::from_json(bundle.to_json().as_bytes()).unwrap();
        assert_eq!(decoded, bundle);
        let report = decoded.evaluate_split(SplitName::Test).unwrap();
        assert_eq!(Some(&report), a.test.as_ref());
    }

    #[test]
    fn failed_trials_are_logged_and_skipped() {
        let config = small_config(5);
        let corpus = prepare(&config).unwrap();
        let features = Features::build(&corpus, &config).unwrap();
        let configs = vec![ps(json!({"C": -1})), ps(json!({"C": 1}))];
        let (r, _) = run_configurations(&config, ModelFamily::Logistic, configs, &corpus, &features).unwrap();
        assert!(r.trials[0].error.is_some());
        assert_eq!(r.best_index, Some(1));

        let (r, bundle) = run_configurations(&config, ModelFamily::Logistic, vec![ps(json!({"C": -1}))], &corpus, &features).unwrap();
        assert_eq!(r.status, SearchStatus::NoSuccessfulTrials);
        assert!(r.test.is_none() && bundle.is_none());
    }

    #[test]
    fn bundle_with_mismatched_width_rejected() {
        let config = small_config(2);
        let corpus = prepare(&config).unwrap();
        let features = Features::build(&corpus, &config).unwrap();
        let (_, bundle) = train_single(&config, ModelFamily::Logistic, ps(json!({"C": 1})), &corpus, &features).unwrap();
        let mut bundle = bundle.unwrap();
        bundle.tfidf = Some(TfIdfModel::from_parts(vec!["a".into()], vec![1.0], 1, (1, 1)).unwrap());
        assert!(ModelBundle::from_json(bundle.to_json().as_bytes()).is_err());
        bundle.tfidf = None;
        assert!(ModelBundle::from_json(bundle.to_json().as_bytes()).is_err());
    }

    #[test]
    fn trial_seeds_distinct_across_families() {
        let mut seen = HashSet::new();
        for f in ModelFamily::ALL {
            for t in 0..50 {
                assert!(seen.insert(trial_seed(42, f, t)));
            }
        }
    }
}
