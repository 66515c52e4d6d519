//! Experiment orchestration: configuration, hyperparameter search, the
//! synthetic corpus generator, the train/evaluate pipeline and reports.

pub mod config;
pub mod pipeline;
pub mod report;
pub mod search;
pub mod synthetic;

pub use config::{default_space, preset, preset_variants, CorpusSource, ExperimentConfig, ModelFamily, SequenceSettings, SCHEMA_VERSION};
pub use pipeline::{
    fit_model, model_spec, predict_split, prepare, run_configurations, run_search, train_single, trial_seed, Features, FittedModel, ModelBundle, ModelSpec,
    PreparedCorpus, SearchResult, SearchStatus, SplitName, TrialRecord,
};
pub use report::{emit_distribution, emit_report, summarize, ClassDistribution, ReportFormat, ReportSummary};
pub use search::{select_best, Axis, AxisValues, Law, ParamSet, SearchSpace, Strategy};
pub use synthetic::{generate, ClassShare, SyntheticSpec};
