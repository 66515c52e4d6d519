use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds::{child_seed, rng, Stream};
use crate::LabelId;

/// Index lists into the document list. Each list is sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub seed: u64,
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// `(train, validation, test)` sizes: test is `round(0.2 n)`, validation is
/// `round(0.25 (n - test))`, train takes the rest.
pub fn split_sizes(n: usize) -> Result<(usize, usize, usize)> {
    if n < 5 {
        return Err(Error::CorpusTooSmall(n));
    }
    let test = (0.20 * n as f64).round() as usize;
    let validation = (0.25 * (n - test) as f64).round() as usize;
    Ok((n - test - validation, validation, test))
}

/// Two-step random split: the test set is drawn first, then the remainder is
/// split 75/25 into train and validation. Not stratified.
pub fn split_dataset(n: usize, seed: u64) -> Result<DatasetSplit> {
    let (_, n_val, n_test) = split_sizes(n)?;
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut rng(child_seed(seed, Stream::Split, 0)));
    let mut test = all[..n_test].to_vec();
    let mut rest = all[n_test..].to_vec();
    rest.sort_unstable();
    rest.shuffle(&mut rng(child_seed(seed, Stream::Split, 1)));
    let mut validation = rest[..n_val].to_vec();
    let mut train = rest[n_val..].to_vec();
    test.sort_unstable();
    validation.sort_unstable();
    train.sort_unstable();
    Ok(DatasetSplit {
        seed,
        train,
        validation,
        test,
    })
}

/// Same sizes as [`split_dataset`], but each step allocates its quota across
/// classes in proportion to class size (largest remainder).
pub fn split_dataset_stratified(labels: &[LabelId], seed: u64) -> Result<DatasetSplit> {
    let n = labels.len();
    let (_, n_val, n_test) = split_sizes(n)?;
    let all: Vec<usize> = (0..n).collect();
    let (test, rest) = stratified_draw(&all, labels, n_test, child_seed(seed, Stream::Split, 0));
    let (validation, train) = stratified_draw(&rest, labels, n_val, child_seed(seed, Stream::Split, 1));
    Ok(DatasetSplit {
        seed,
        train,
        validation,
        test,
    })
}

fn stratified_draw(pool: &[usize], labels: &[LabelId], take: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut by_class: BTreeMap<LabelId, Vec<usize>> = BTreeMap::new();
    for &i in pool {
        by_class.entry(labels[i]).or_default().push(i);
    }
    let total = pool.len() as f64;
    let mut quotas: Vec<(LabelId, usize, f64)> = by_class
        .iter()
        .map(|(&k, v)| {
            let exact = take as f64 * v.len() as f64 / total;
            (k, exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let mut remaining = take - quotas.iter().map(|q| q.1).sum::<usize>();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| quotas[b].2.total_cmp(&quotas[a].2).then(a.cmp(&b)));
    for &o in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        if quotas[o].1 < by_class[&quotas[o].0].len() {
            quotas[o].1 += 1;
            remaining -= 1;
        }
    }
    let mut r = rng(seed);
    let (mut drawn, mut kept) = (Vec::new(), Vec::new());
    for (k, quota, _) in quotas {
        let mut members = by_class[&k].clone();
        members.shuffle(&mut r);
        drawn.extend_from_slice(&members[..quota]);
        kept.extend_from_slice(&members[quota..]);
    }
    drawn.sort_unstable();
    kept.sort_unstable();
    (drawn, kept)
}

impl DatasetSplit {
    /// Checks disjointness, coverage of `0..n` and the size formula.
    pub fn validate(&self, n: usize) -> Result<()> {
        let (n_train, n_val, n_test) = split_sizes(n)?;
        if (self.train.len(), self.validation.len(), self.test.len()) != (n_train, n_val, n_test) {
            return Err(Error::InvalidConfig(format!(
                "split sizes ({}, {}, {}) do not match ({n_train}, {n_val}, {n_test}) for n = {n}",
                self.train.len(),
                self.validation.len(),
                self.test.len()
            )));
        }
        let mut seen = vec![false; n];
        for &i in self.train.iter().chain(&self.validation).chain(&self.test) {
            if i >= n || seen[i] {
                return Err(Error::InvalidConfig(format!("split index {i} out of range or repeated")));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// On-disk form of a split, with load statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub n_documents: usize,
    pub dropped_empty: usize,
    pub stratified: bool,
    #[serde(flatten)]
    pub split: DatasetSplit,
}

impl SplitManifest {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let m: SplitManifest = serde_json::from_slice(bytes)?;
        m.split.validate(m.n_documents)?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
