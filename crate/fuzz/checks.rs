#![allow(dead_code)]

//! Per-target properties, shared by the fuzz targets and the stable replay
//! test in the core crate. Each function must accept any byte string
//! without panicking; assertions state what a successful decode promises.

use std::collections::HashSet;

use mhtext::corpus::{clean_text, normalize, parse_csv, Lemmatizer, SplitManifest};
use mhtext::features::TfIdfModel;
use mhtext::harness::{summarize, ExperimentConfig, ModelBundle, SearchResult};

fn probe_doc() -> Vec<String> {
    ["feel", "tired", "feel", "today"].iter().map(|s| s.to_string()).collect()
}

pub fn csv_corpus(data: &[u8]) {
    if let Ok(corpus) = parse_csv(data) {
        let mut ids = HashSet::new();
        for r in &corpus.records {
            assert!(!r.statement.trim().is_empty(), "empty statements are dropped");
            assert!(ids.insert(r.id.as_str()), "ids are unique");
        }
    }
}

pub fn clean_text_target(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for token in normalize(&clean_text(text)) {
        assert!(!token.is_empty());
        assert!(!token.chars().any(char::is_whitespace));
    }
}

pub fn lemma_rules(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(lemmatizer) = Lemmatizer::from_rules(text) {
        for word in ["running", "studies", "was", "feelings", "class", "a", ""] {
            let _ = lemmatizer.lemmatize(word);
        }
    }
}

pub fn experiment_config(data: &[u8]) {
    if let Ok(config) = ExperimentConfig::from_json(data) {
        let again = ExperimentConfig::from_json(config.to_json().as_bytes()).expect("re-encoded config decodes");
        assert_eq!(again, config);
    }
}

pub fn model_bundle(data: &[u8]) {
    if let Ok(bundle) = ModelBundle::from_json(data) {
        let doc = probe_doc();
        let k = bundle.scheme.n_classes();
        let (pred, scores) = bundle.predict_tokens(&[doc.as_slice()]).expect("validated bundle predicts");
        assert!(pred[0] < k);
        assert_eq!(scores[0].len(), k);
    }
}

pub fn tfidf_model(data: &[u8]) {
    if let Ok(model) = TfIdfModel::from_json(data) {
        let v = model.transform(&probe_doc());
        assert_eq!(v.dim(), model.dim());
        assert!(v.is_finite());
    }
}

pub fn split_manifest(data: &[u8]) {
    if let Ok(m) = SplitManifest::from_json(data) {
        let s = &m.split;
        assert_eq!(s.train.len() + s.validation.len() + s.test.len(), m.n_documents);
    }
}

pub fn search_result(data: &[u8]) {
    if let Ok(result) = SearchResult::from_json(data) {
        assert_eq!(summarize(&result).n_trials, result.trials.len());
        let _ = result.distribution.to_svg();
        let _ = result.distribution.to_csv();
    }
}
