//! Text-classification toolkit for social-media mental-health corpora.
//!
//! The pipeline runs in stages that mirror the modules below:
//!
//! - [`corpus`]: CSV ingestion, text cleaning, normalization, label schemes
//!   and seeded train/validation/test splits.
//! - [`features`]: capped unigram+bigram TF-IDF with L2-normalized sparse rows.
//! - [`linear`], [`svm`], [`trees`], [`gru`]: the model families.
//! - [`metrics`]: confusion matrices, precision/recall/F1, ROC and AUROC.
//! - [`harness`]: grid/random search selected by validation weighted F1,
//!   experiment configuration and report emission.
//!
//! Every stochastic step takes an explicit seed; see [`seeds`] for how child
//! seeds are derived from a single experiment seed.

pub mod corpus;
pub mod error;
pub mod features;
pub mod gru;
pub mod harness;
pub mod linear;
pub mod matrix;
pub mod metrics;
pub mod seeds;
pub mod svm;
pub mod trees;

pub use error::{Error, Result};

/// Dense class identifier, `0..K`.
pub type LabelId = usize;

/// `none` or `balanced` per-class weighting, shared by every model family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeightMode {
    #[default]
    None,
    Balanced,
}
