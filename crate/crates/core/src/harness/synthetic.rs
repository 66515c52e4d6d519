//! Keyword-separable corpus generator for end-to-end checks.
//!
//! Every class owns a disjoint set of invented keywords; all classes share a
//! pool of filler words. Documents mix a few class keywords into filler text
//! and sprinkle in the noise the cleaner must strip (URLs, mentions, HTML
//! tags, hashtags, punctuation, capitals). Class counts are exact: shares are
//! turned into counts by the largest-remainder rule.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{is_stopword, RawRecord};
use crate::error::{Error, Result};
use crate::seeds::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassShare {
    pub name: String,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n_docs: usize,
    pub classes: Vec<ClassShare>,
    pub seed: u64,
    pub keywords_per_class: usize,
    pub filler_words: usize,
    /// Token count range per document, inclusive.
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Fraction of a document's tokens drawn from its class keywords (at least 2).
    pub keyword_rate: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_docs: 2000,
            classes: vec![
                ClassShare { name: "Normal".into(), share: 0.34 },
                ClassShare { name: "Depression".into(), share: 0.66 },
            ],
            seed: 7,
            keywords_per_class: 40,
            filler_words: 300,
            min_tokens: 8,
            max_tokens: 20,
            keyword_rate: 0.25,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("synthetic corpus: {m}")));
        if self.n_docs < 5 {
            return bad("n_docs must be >= 5");
        }
        if self.classes.len() < 2 {
            return bad("at least two classes");
        }
        let names: HashSet<&str> = self.classes.iter().map(|c| c.name.as_str()).collect();
        if names.len() != self.classes.len() || self.classes.iter().any(|c| c.name.trim().is_empty()) {
            return bad("class names must be unique and non-empty");
        }
        if self.classes.iter().any(|c| !(c.share > 0.0 && c.share.is_finite())) {
            return bad("shares must be positive");
        }
        if self.keywords_per_class < 2 || self.filler_words < 1 || self.min_tokens < 2 || self.min_tokens > self.max_tokens {
            return bad("vocabulary and length settings");
        }
        if !(0.0..=1.0).contains(&self.keyword_rate) {
            return bad("keyword_rate must lie in [0, 1]");
        }
        Ok(())
    }

    /// Exact per-class document counts.
    pub fn class_counts(&self) -> Vec<usize> {
        let total: f64 = self.classes.iter().map(|c| c.share).sum();
        let exact: Vec<f64> = self.classes.iter().map(|c| c.share / total * self.n_docs as f64).collect();
        let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
        let mut order: Vec<usize> = (0..exact.len()).collect();
        order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
        let missing = self.n_docs - counts.iter().sum::<usize>();
        for &k in order.iter().take(missing) {
            counts[k] += 1;
        }
        counts
    }
}

const ONSETS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "t", "v", "z"];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u"];

/// Three consonant-vowel syllables; vowel endings are left alone by the
/// lemmatizer's suffix rules.
fn invent_word(r: &mut ChaCha8Rng) -> String {
    (0..3).map(|_| format!("{}{}", ONSETS[r.gen_range(0..ONSETS.len())], VOWELS[r.gen_range(0..VOWELS.len())])).collect()
}

fn invent_words(r: &mut ChaCha8Rng, n: usize, taken: &mut HashSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = invent_word(r);
        if !is_stopword(&w) && taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

pub fn generate(spec: &SyntheticSpec) -> Result<Vec<RawRecord>> {
    spec.validate()?;
    let mut r = rng(spec.seed);
    let mut taken = HashSet::new();
    let keywords: Vec<Vec<String>> = spec.classes.iter().map(|_| invent_words(&mut r, spec.keywords_per_class, &mut taken)).collect();
    let filler = invent_words(&mut r, spec.filler_words, &mut taken);
    let mut labels: Vec<usize> = spec.class_counts().iter().enumerate().flat_map(|(k, &c)| std::iter::repeat(k).take(c)).collect();
    labels.shuffle(&mut r);
    let records = labels
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let len = r.gen_range(spec.min_tokens..=spec.max_tokens);
            let n_kw = ((spec.keyword_rate * len as f64).round() as usize).clamp(2, len);
            let mut words: Vec<String> = (0..len)
                .map(|j| {
                    let pool = if j < n_kw { &keywords[k] } else { &filler };
                    pool[r.gen_range(0..pool.len())].clone()
                })
                .collect();
            words.shuffle(&mut r);
            if r.gen_bool(0.5) {
                let w = &mut words[0];
                *w = w[..1].to_uppercase() + &w[1..];
            }
            if r.gen_bool(0.2) {
                let j = r.gen_range(0..words.len());
                words[j] = format!("#{}", words[j]);
            }
            let mut text = words.join(" ");
            if r.gen_bool(0.3) {
                text.push_str(&format!(" https://example.org/{}?ref={}", filler[r.gen_range(0..filler.len())], i));
            }
            if r.gen_bool(0.3) {
                text = format!("@user{} {}", r.gen_range(0..500), text);
            }
            if r.gen_bool(0.2) {
                text = format!("<p>{text}</p>");
            }
            if r.gen_bool(0.4) {
                text.push_str(["!", "...", "?!", " :)"][r.gen_range(0..4)]);
            }
            RawRecord::new(format!("syn-{i}"), text, spec.classes[k].name.clone())
        })
        .collect();
    Ok(records)
}
