//! Capped unigram+bigram TF-IDF.
//!
//! `idf(t) = ln((1 + N) / (1 + df(t))) + 1`; document vectors are raw counts
//! times idf, L2-normalized.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse row over a fixed-width feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn empty(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Keeps the nonzero entries of `dense`.
    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i as u32, v))
            .unzip();
        SparseVector {
            dim: dense.len(),
            indices,
            values,
        }
    }

    /// Validating constructor: indices strictly increasing and `< dim`, no
    /// stored zeros.
    pub fn new(dim: usize, indices: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        let v = SparseVector { dim, indices, values };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        if self.indices.len() != self.values.len() {
            return Err(Error::InvalidModel("sparse vector index/value length mismatch".into()));
        }
        if self.indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidModel("sparse indices not strictly increasing".into()));
        }
        if self.indices.last().is_some_and(|&i| i as usize >= self.dim) {
            return Err(Error::InvalidModel("sparse index beyond dimension".into()));
        }
        if self.values.iter().any(|&v| v == 0.0) {
            return Err(Error::InvalidModel("sparse vector stores a zero".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().zip(&self.values).map(|(&i, &v)| (i as usize, v))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            d[i] = v;
        }
        d
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Dot product with a dense vector of at least `dim` entries.
    #[inline]
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b, mut acc) = (0, 0, 0.0);
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// `out += scale * self`.
    #[inline]
    pub fn axpy_into(&self, scale: f64, out: &mut [f64]) {
        for (i, v) in self.iter() {
            out[i] += scale * v;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    fn from_terms(terms: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidModel(format!("duplicate vocabulary term `{t}`")));
            }
        }
        Ok(Vocabulary { terms, index })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TfIdfConfig {
    pub max_features: usize,
    pub ngram_range: (usize, usize),
}

impl Default for TfIdfConfig {
    fn default() -> Self {
        TfIdfConfig {
            max_features: 1000,
            ngram_range: (1, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    vocabulary: Vocabulary,
    idf: Vec<f64>,
    n_docs: usize,
    ngram_range: (usize, usize),
}

#[derive(Serialize, Deserialize)]
struct TfIdfModelJson {
    terms: Vec<String>,
    idf: Vec<f64>,
    n_docs: usize,
    ngram_range: (usize, usize),
}

/// N-grams of `tokens` for every n in `range`, space-joined.
pub fn ngrams(tokens: &[String], range: (usize, usize)) -> impl Iterator<Item = String> + '_ {
    (range.0.max(1)..=range.1).flat_map(move |n| tokens.windows(n).map(|w| w.join(" ")))
}

/// Fits vocabulary and idf. The vocabulary keeps the `max_features` n-grams
/// with the highest total count (ties: lexicographically smaller first);
/// column ids follow lexicographic term order.
pub fn fit<D: AsRef<[String]>>(docs: &[D], config: &TfIdfConfig) -> Result<TfIdfModel> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let (lo, hi) = config.ngram_range;
    if lo == 0 || lo > hi {
        return Err(Error::InvalidConfig(format!("bad n-gram range ({lo}, {hi})")));
    }
    // term -> (total count, document frequency)
    let mut stats: HashMap<String, (usize, usize)> = HashMap::new();
    for doc in docs {
        let mut in_doc: HashMap<String, usize> = HashMap::new();
        for g in ngrams(doc.as_ref(), config.ngram_range) {
            *in_doc.entry(g).or_default() += 1;
        }
        for (g, c) in in_doc {
            let e = stats.entry(g).or_default();
            e.0 += c;
            e.1 += 1;
        }
    }
    let mut ranked: Vec<(String, usize, usize)> = stats.into_iter().map(|(t, (c, df))| (t, c, df)).collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(config.max_features);
    ranked.sort_unstable_by(|a, b| a.0.cmp(&b.0));

    let n = docs.len();
    let idf = ranked
        .iter()
        .map(|&(_, _, df)| ((1.0 + n as f64) / (1.0 + df as f64)).ln() + 1.0)
        .collect();
    let terms = ranked.into_iter().map(|(t, _, _)| t).collect();
    Ok(TfIdfModel {
        vocabulary: Vocabulary::from_terms(terms)?,
        idf,
        n_docs: n,
        ngram_range: config.ngram_range,
    })
}

impl TfIdfModel {
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn dim(&self) -> usize {
        self.idf.len()
    }

    /// Counts times idf, L2-normalized. Out-of-vocabulary n-grams are ignored;
    /// a document with none in vocabulary maps to the empty vector.
    pub fn transform(&self, doc: &[String]) -> SparseVector {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for g in ngrams(doc, self.ngram_range) {
            if let Some(j) = self.vocabulary.get(&g) {
                *counts.entry(j).or_default() += 1;
            }
        }
        let mut indices = Vec::with_capacity(counts.len());
        let mut values = Vec::with_capacity(counts.len());
        for (j, c) in counts {
            indices.push(j as u32);
            values.push(c as f64 * self.idf[j]);
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            values.iter_mut().for_each(|v| *v /= norm);
        }
        SparseVector {
            dim: self.dim(),
            indices,
            values,
        }
    }

    pub fn transform_all<D: AsRef<[String]> + Sync>(&self, docs: &[D]) -> Vec<SparseVector> {
        use rayon::prelude::*;
        docs.par_iter().map(|d| self.transform(d.as_ref())).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TfIdfModelJson {
            terms: self.vocabulary.terms.clone(),
            idf: self.idf.clone(),
            n_docs: self.n_docs,
            ngram_range: self.ngram_range,
        })
        .expect("tf-idf model serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let raw: TfIdfModelJson = serde_json::from_slice(bytes)?;
        Self::from_parts(raw.terms, raw.idf, raw.n_docs, raw.ngram_range)
    }

    pub fn from_parts(terms: Vec<String>, idf: Vec<f64>, n_docs: usize, ngram_range: (usize, usize)) -> Result<Self> {
        if terms.len() != idf.len() {
            return Err(Error::InvalidModel("idf length differs from vocabulary size".into()));
        }
        if idf.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidModel("idf values must be finite and positive".into()));
        }
        if ngram_range.0 == 0 || ngram_range.0 > ngram_range.1 || ngram_range.1 > 8 {
            return Err(Error::InvalidModel("bad n-gram range".into()));
        }
        Ok(TfIdfModel {
            vocabulary: Vocabulary::from_terms(terms)?,
            idf,
            n_docs,
            ngram_range,
        })
    }
}

impl Serialize for TfIdfModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TfIdfModelJson {
            terms: self.vocabulary.terms.clone(),
            idf: self.idf.clone(),
            n_docs: self.n_docs,
            ngram_range: self.ngram_range,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TfIdfModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TfIdfModelJson::deserialize(d)?;
        TfIdfModel::from_parts(raw.terms, raw.idf, raw.n_docs, raw.ngram_range).map_err(serde::de::Error::custom)
    }
}
