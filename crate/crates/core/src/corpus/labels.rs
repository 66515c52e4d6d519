use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::RawRecord;
use crate::error::{Error, Result};
use crate::LabelId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Binary,
    Multiclass,
}

/// Maps raw status strings to dense class ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelScheme {
    pub kind: SchemeKind,
    pub names: Vec<String>,
    pub mapping: BTreeMap<String, LabelId>,
    /// Id for statuses absent from `mapping`. Only the binary scheme sets it.
    #[serde(default)]
    pub fallback: Option<LabelId>,
}

pub const NORMAL: &str = "Normal";

impl LabelScheme {
    /// `Normal` is 0; every other status is `Abnormal` (1).
    pub fn binary() -> Self {
        LabelScheme {
            kind: SchemeKind::Binary,
            names: vec![NORMAL.to_string(), "Abnormal".to_string()],
            mapping: BTreeMap::from([(NORMAL.to_string(), 0)]),
            fallback: Some(1),
        }
    }

    /// One class per name, ids in the given order.
    pub fn multiclass<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.len() < 2 {
            return Err(Error::InvalidConfig("a multiclass scheme needs at least two classes".into()));
        }
        let mut mapping = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref().trim();
            if mapping.insert(n.to_string(), i).is_some() {
                return Err(Error::InvalidConfig(format!("class `{n}` listed twice")));
            }
        }
        Ok(LabelScheme {
            kind: SchemeKind::Multiclass,
            names: names.iter().map(|n| n.as_ref().trim().to_string()).collect(),
            mapping,
            fallback: None,
        })
    }

    /// Multiclass scheme over the distinct statuses in `records`, sorted
    /// lexicographically so ids do not depend on row order.
    pub fn from_records(records: &[RawRecord]) -> Result<Self> {
        let names: BTreeSet<&str> = records.iter().map(|r| r.status.trim()).collect();
        let names: Vec<&str> = names.into_iter().collect();
        Self::multiclass(&names)
    }

    pub fn n_classes(&self) -> usize {
        self.names.len()
    }

    pub fn label_of(&self, status: &str) -> Result<LabelId> {
        let status = status.trim();
        self.mapping
            .get(status)
            .copied()
            .or(self.fallback)
            .ok_or_else(|| Error::UnknownLabel(status.to_string()))
    }

    /// Checks the decoded form is self-consistent.
    pub fn validate(&self) -> Result<()> {
        let k = self.names.len();
        if k < 2 {
            return Err(Error::InvalidConfig("label scheme needs at least two classes".into()));
        }
        if self.mapping.values().chain(self.fallback.iter()).any(|&id| id >= k) {
            return Err(Error::InvalidConfig("label id out of range".into()));
        }
        if self.kind == SchemeKind::Binary && k != 2 {
            return Err(Error::InvalidConfig("binary scheme must have two classes".into()));
        }
        Ok(())
    }
}

pub fn map_labels(records: &[RawRecord], scheme: &LabelScheme) -> Result<Vec<LabelId>> {
    records.iter().map(|r| scheme.label_of(&r.status)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(status: &str) -> RawRecord {
        RawRecord::new("x", "text", status)
    }

    #[test]
    fn binary_mapping() {
        let s = LabelScheme::binary();
        assert_eq!(s.label_of("Normal").unwrap(), 0);
        assert_eq!(s.label_of("Anxiety").unwrap(), 1);
        assert_eq!(s.label_of("Personality disorder").unwrap(), 1);
    }

    #[test]
    fn unknown_status_reported_verbatim() {
        let s = LabelScheme::multiclass(&[
            "Anxiety",
            "Depression",
            "Normal",
            "Personality disorder",
            "Stress",
            "Suicidal",
        ])
        .unwrap();
        match map_labels(&[rec("Normal"), rec("Bipolar")], &s) {
            Err(Error::UnknownLabel(l)) => assert_eq!(l, "Bipolar"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn data_driven_scheme_is_sorted() {
        let recs: Vec<_> = ["Suicidal", "Normal", "Depression", "Anxiety", "Bipolar", "Stress", "Personality disorder"]
            .iter()
            .map(|s| rec(s))
            .collect();
        let s = LabelScheme::from_records(&recs).unwrap();
        assert_eq!(s.n_classes(), 7);
        // matches the usual alphabetical encoding, where Depression is class 2
        assert_eq!(s.label_of("Depression").unwrap(), 2);
        let ids = map_labels(&recs, &s).unwrap();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(sorted, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn duplicate_class_names_rejected() {
        assert!(LabelScheme::multiclass(&["a", "b", "a"]).is_err());
    }

    proptest! {
        #[test]
        fn binary_is_surjective(others in proptest::collection::vec("[A-Z][a-z]{2,8}", 1..10)) {
            let mut recs = vec![rec("Normal")];
            let mut any_other = false;
            for o in &others {
                if o != "Normal" { any_other = true; }
                recs.push(rec(o));
            }
            prop_assume!(any_other);
            let ids: BTreeSet<_> = map_labels(&recs, &LabelScheme::binary()).unwrap().into_iter().collect();
            prop_assert_eq!(ids, BTreeSet::from([0, 1]));
        }
    }
}
