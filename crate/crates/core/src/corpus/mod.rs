//! Corpus ingestion and preparation.

mod clean;
mod labels;
mod load;
mod normalize;
mod split;

pub use clean::{clean_text, clean_text_with, CleanOptions};
pub use labels::{map_labels, LabelScheme, SchemeKind};
pub use load::{load_csv, parse_csv, write_csv, LoadedCorpus, RawRecord};
pub use normalize::{is_stopword, normalize, stopwords, Lemmatizer};
pub use split::{split_dataset, split_dataset_stratified, split_sizes, DatasetSplit, SplitManifest};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::LabelId;

/// A cleaned, tokenized record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub raw: String,
    pub tokens: Vec<String>,
    pub label: LabelId,
}

/// Cleans, normalizes and labels every record. Output order matches input.
pub fn prepare_documents(
    records: &[RawRecord],
    scheme: &LabelScheme,
    options: &CleanOptions,
) -> Result<Vec<Document>> {
    let labels = map_labels(records, scheme)?;
    Ok(records
        .par_iter()
        .zip(labels.par_iter())
        .map(|(rec, &label)| Document {
            id: rec.id.clone(),
            raw: rec.statement.clone(),
            tokens: normalize(&clean_text_with(&rec.statement, options)),
            label,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_follow_record_order() {
        let records = vec![
            RawRecord::new("a", "I feel #hopeless today", "Depression"),
            RawRecord::new("b", "Lovely walk in the park", "Normal"),
        ];
        let docs =
            prepare_documents(&records, &LabelScheme::binary(), &CleanOptions::default()).unwrap();
        assert_eq!(docs[0].id, "a");
        assert_eq!(docs[0].label, 1);
        assert_eq!(docs[0].tokens, vec!["feel", "hopeless", "today"]);
        assert_eq!(docs[1].label, 0);
    }
}
