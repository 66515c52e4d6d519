use std::collections::{HashMap, HashSet};

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

const STOPWORDS_TXT: &str = include_str!("../../data/stopwords.txt");
const LEMMA_RULES_TXT: &str = include_str!("../../data/lemma_rules.txt");

static STOPWORDS: Lazy<HashSet<&'static str>> = Lazy::new(|| {
    STOPWORDS_TXT
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
});

static BUILTIN_LEMMATIZER: Lazy<Lemmatizer> =
    Lazy::new(|| Lemmatizer::from_rules(LEMMA_RULES_TXT).expect("built-in lemma rules parse"));

/// The built-in stopword list, sorted.
pub fn stopwords() -> Vec<&'static str> {
    let mut v: Vec<_> = STOPWORDS.iter().copied().collect();
    v.sort_unstable();
    v
}

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.contains(token)
}

/// Whitespace tokenization, lowercasing, stopword removal and lemmatization,
/// in that order. Expects [`clean_text`](super::clean_text) output.
///
/// A lemma that lands on a stopword ("doing" -> "do") is dropped as well, so
/// the output never contains a stopword.
pub fn normalize(text: &str) -> Vec<String> {
    let lemmatizer = &*BUILTIN_LEMMATIZER;
    text.split_whitespace()
        .map(|t| {
            // a handful of letters (e.g. U+03D2) are uppercase with no
            // lowercase mapping; they are dropped rather than kept uppercase
            t.trim_matches('\'')
                .to_lowercase()
                .chars()
                .filter(|c| !c.is_uppercase())
                .collect::<String>()
        })
        .filter(|t| !t.is_empty() && !is_stopword(t))
        .map(|t| lemmatizer.lemmatize(&t))
        .filter(|t| !t.is_empty() && !is_stopword(t))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct SuffixRule {
    suffix: String,
    replacement: String,
    min_stem: usize,
    undouble: bool,
    restore_e: bool,
}

/// Rule-based suffix stripper driven by a versioned rule table.
#[derive(Debug, Clone)]
pub struct Lemmatizer {
    version: u32,
    exceptions: HashMap<String, String>,
    // sorted by suffix length, longest first; stable in file order
    rules: Vec<SuffixRule>,
}

impl Lemmatizer {
    /// The rule table shipped in `data/lemma_rules.txt`.
    pub fn builtin() -> &'static Lemmatizer {
        &BUILTIN_LEMMATIZER
    }

    /// Parses a rule table (see `data/lemma_rules.txt` for the format).
    pub fn from_rules(text: &str) -> Result<Self> {
        let mut version = None;
        let mut exceptions = HashMap::new();
        let mut rules = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::InvalidConfig(format!("lemma rules line {}: {msg}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "version" => {
                    let v = fields.get(1).and_then(|v| v.parse().ok()).ok_or_else(|| bad("bad version"))?;
                    version = Some(v);
                }
                "exception" => {
                    if fields.len() != 3 {
                        return Err(bad("exception takes <surface> <lemma>"));
                    }
                    exceptions.insert(fields[1].to_string(), fields[2].to_string());
                }
                "suffix" => {
                    if fields.len() < 4 {
                        return Err(bad("suffix takes <suffix> <replacement> <min_stem> [flags]"));
                    }
                    let replacement = if fields[2] == "-" { "" } else { fields[2] };
                    let min_stem = fields[3].parse().map_err(|_| bad("min_stem must be an integer"))?;
                    let mut rule = SuffixRule {
                        suffix: fields[1].to_string(),
                        replacement: replacement.to_string(),
                        min_stem,
                        undouble: false,
                        restore_e: false,
                    };
                    for flag in &fields[4..] {
                        match *flag {
                            "undouble" => rule.undouble = true,
                            "restore_e" => rule.restore_e = true,
                            other => return Err(bad(&format!("unknown flag `{other}`"))),
                        }
                    }
                    rules.push(rule);
                }
                other => return Err(bad(&format!("unknown directive `{other}`"))),
            }
        }
        let version = version.ok_or_else(|| Error::InvalidConfig("lemma rules: missing version".into()))?;
        rules.sort_by_key(|r| std::cmp::Reverse(r.suffix.chars().count()));
        Ok(Lemmatizer {
            version,
            exceptions,
            rules,
        })
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn lemmatize(&self, word: &str) -> String {
        if let Some(lemma) = self.exceptions.get(word) {
            return lemma.clone();
        }
        let n_chars = word.chars().count();
        for rule in &self.rules {
            if !word.ends_with(rule.suffix.as_str()) {
                continue;
            }
            let stem_chars = n_chars - rule.suffix.chars().count();
            if stem_chars < rule.min_stem {
                continue;
            }
            let mut stem = word[..word.len() - rule.suffix.len()].to_string();
            let mut undoubled = false;
            if rule.undouble && ends_with_double_consonant(&stem) {
                stem.pop();
                undoubled = true;
            }
            if rule.restore_e && !undoubled && is_short_cvc(&stem) {
                stem.push('e');
            }
            stem.push_str(&rule.replacement);
            return stem;
        }
        word.to_string()
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn ends_with_double_consonant(stem: &str) -> bool {
    let mut it = stem.chars().rev();
    match (it.next(), it.next()) {
        (Some(a), Some(b)) => {
            a == b && a.is_ascii_alphabetic() && !is_vowel(a) && !matches!(a, 'l' | 's' | 'z')
        }
        _ => false,
    }
}

fn is_short_cvc(stem: &str) -> bool {
    let c: Vec<char> = stem.chars().collect();
    c.len() == 3
        && c.iter().all(char::is_ascii_lowercase)
        && !is_vowel(c[0])
        && is_vowel(c[1])
        && !is_vowel(c[2])
        && !matches!(c[2], 'w' | 'x' | 'y')
}
