//! Imbalance-aware evaluation.
//!
//! F1 is computed from counts as `2TP / (2TP + FP + FN)`, which equals the
//! harmonic mean of precision and recall whenever that is defined and is 0
//! otherwise. AUROC is the Mann-Whitney statistic with midranks, so
//! `P(s+ > s-) + P(s+ = s-) / 2`; the trapezoidal ROC area reproduces it
//! exactly because both are accumulated in integer pair counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::LabelId;

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|k| self.counts[k][k]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.trace(), self.total())
    }
}

pub fn confusion_matrix(y_true: &[LabelId], y_pred: &[LabelId], n_classes: usize) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        for label in [t, p] {
            if label >= n_classes {
                return Err(Error::LabelOutOfRange { label, n_classes });
            }
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassPrf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// No predictions of this class, so precision was 0/0 and reported as 0.
    pub precision_undefined: bool,
    /// No true samples of this class, so recall was 0/0 and reported as 0.
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averaged {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrfReport {
    pub per_class: Vec<ClassPrf>,
    pub macro_avg: Averaged,
    pub micro_avg: Averaged,
    pub weighted_avg: Averaged,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn precision_recall_f1(cm: &ConfusionMatrix) -> PrfReport {
    let k = cm.n_classes();
    let mut per_class = Vec::with_capacity(k);
    let (mut tp_sum, mut fp_sum, mut fn_sum) = (0u64, 0u64, 0u64);
    for c in 0..k {
        let tp = cm.counts[c][c];
        let predicted: u64 = (0..k).map(|r| cm.counts[r][c]).sum();
        let support: u64 = cm.counts[c].iter().sum();
        let (fp, fn_) = (predicted - tp, support - tp);
        tp_sum += tp;
        fp_sum += fp;
        fn_sum += fn_;
        per_class.push(ClassPrf {
            precision: ratio(tp, predicted),
            recall: ratio(tp, support),
            f1: ratio(2 * tp, 2 * tp + fp + fn_),
            support,
            precision_undefined: predicted == 0,
            recall_undefined: support == 0,
        });
    }
    let mean = |f: fn(&ClassPrf) -> f64| {
        if k == 0 {
            0.0
        } else {
            per_class.iter().map(f).sum::<f64>() / k as f64
        }
    };
    let total: u64 = per_class.iter().map(|c| c.support).sum();
    let weighted = |f: fn(&ClassPrf) -> f64| {
        if total == 0 {
            0.0
        } else {
            per_class.iter().map(|c| c.support as f64 * f(c)).sum::<f64>() / total as f64
        }
    };
    PrfReport {
        macro_avg: Averaged {
            precision: mean(|c| c.precision),
            recall: mean(|c| c.recall),
            f1: mean(|c| c.f1),
        },
        micro_avg: Averaged {
            precision: ratio(tp_sum, tp_sum + fp_sum),
            recall: ratio(tp_sum, tp_sum + fn_sum),
            f1: ratio(2 * tp_sum, 2 * tp_sum + fp_sum + fn_sum),
        },
        weighted_avg: Averaged {
            precision: weighted(|c| c.precision),
            recall: weighted(|c| c.recall),
            f1: weighted(|c| c.f1),
        },
        per_class,
    }
}

/// Weighted F1 straight from label vectors.
pub fn weighted_f1(y_true: &[LabelId], y_pred: &[LabelId], n_classes: usize) -> Result<f64> {
    Ok(precision_recall_f1(&confusion_matrix(y_true, y_pred, n_classes)?).weighted_avg.f1)
}

fn check_binary_inputs(y_true: &[bool], scores: &[f64], what: &'static str) -> Result<(u64, u64)> {
    if y_true.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: scores.len(),
        });
    }
    if let Some(row) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::NonFinite { row });
    }
    let pos = y_true.iter().filter(|&&y| y).count() as u64;
    let neg = y_true.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClassMetric(what));
    }
    Ok((pos, neg))
}

/// Rank-based AUROC with midranks for ties.
pub fn auroc(y_true: &[bool], scores: &[f64]) -> Result<f64> {
    let (pos, neg) = check_binary_inputs(y_true, scores, "AUROC")?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the rank sum of positives, kept integral: a tie group occupying
    // ranks lo+1..=hi has midrank (lo + 1 + hi) / 2.
    let mut twice_rank_sum: u128 = 0;
    let mut lo = 0;
    while lo < order.len() {
        let mut hi = lo + 1;
        while hi < order.len() && scores[order[hi]] == scores[order[lo]] {
            hi += 1;
        }
        let pos_in_group = order[lo..hi].iter().filter(|&&i| y_true[i]).count() as u128;
        twice_rank_sum += pos_in_group * (lo as u128 + 1 + hi as u128);
        lo = hi;
    }
    // 2U = 2R - P(P+1)
    let twice_u = twice_rank_sum - (pos as u128) * (pos as u128 + 1);
    Ok(twice_u as f64 / (2 * pos as u128 * neg as u128) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Scores `>= threshold` are called positive; infinite at the origin
    /// (written as the string `"inf"` in JSON).
    #[serde(with = "threshold_json")]
    pub threshold: f64,
}

mod threshold_json {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad threshold `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// Threshold sweep over distinct scores, highest first, with trapezoidal area.
pub fn roc_curve(y_true: &[bool], scores: &[f64]) -> Result<RocCurve> {
    let (pos, neg) = check_binary_inputs(y_true, scores, "ROC curve")?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    // twice the area in units of (1/neg) x (1/pos)
    let mut twice_area: u128 = 0;
    let mut lo = 0;
    while lo < order.len() {
        let threshold = scores[order[lo]];
        let mut hi = lo;
        let (mut dp, mut dn) = (0u64, 0u64);
        while hi < order.len() && scores[order[hi]] == threshold {
            if y_true[order[hi]] {
                dp += 1;
            } else {
                dn += 1;
            }
            hi += 1;
        }
        twice_area += dn as u128 * (2 * tp as u128 + dp as u128);
        tp += dp;
        fp += dn;
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
            threshold,
        });
        lo = hi;
    }
    Ok(RocCurve {
        points,
        auc: twice_area as f64 / (2 * pos as u128 * neg as u128) as f64,
    })
}

fn check_score_matrix(y_true: &[LabelId], scores: &[Vec<f64>], n_classes: usize) -> Result<()> {
    if n_classes < 2 {
        return Err(Error::SingleClass(n_classes));
    }
    if y_true.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: scores.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::SingleClassMetric("micro-average ROC"));
    }
    for (row, &y) in scores.iter().zip(y_true) {
        if row.len() != n_classes {
            return Err(Error::DimensionMismatch {
                expected: n_classes,
                got: row.len(),
            });
        }
        if y >= n_classes {
            return Err(Error::LabelOutOfRange { label: y, n_classes });
        }
    }
    Ok(())
}

/// Pools every one-vs-rest `(indicator, score)` pair into a single ROC.
pub fn micro_ovr_roc(y_true: &[LabelId], scores: &[Vec<f64>], n_classes: usize) -> Result<RocCurve> {
    check_score_matrix(y_true, scores, n_classes)?;
    let mut ind = Vec::with_capacity(y_true.len() * n_classes);
    let mut flat = Vec::with_capacity(y_true.len() * n_classes);
    for (row, &y) in scores.iter().zip(y_true) {
        for (k, &s) in row.iter().enumerate() {
            ind.push(y == k);
            flat.push(s);
        }
    }
    roc_curve(&ind, &flat)
}

/// One-vs-rest AUROC per class; `None` where the class is absent or universal.
pub fn per_class_ovr_auroc(y_true: &[LabelId], scores: &[Vec<f64>], n_classes: usize) -> Result<Vec<Option<f64>>> {
    check_score_matrix(y_true, scores, n_classes)?;
    Ok((0..n_classes)
        .map(|k| {
            let ind: Vec<bool> = y_true.iter().map(|&y| y == k).collect();
            let col: Vec<f64> = scores.iter().map(|r| r[k]).collect();
            auroc(&ind, &col).ok()
        })
        .collect())
}

/// Everything reported for one model on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub n_samples: usize,
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub confusion: ConfusionMatrix,
    pub prf: PrfReport,
    /// Binary: ROC of the class-1 score. Multiclass: micro-average one-vs-rest.
    pub roc: Option<RocCurve>,
    pub auroc: Option<f64>,
    pub macro_auroc: Option<f64>,
    pub per_class_auroc: Vec<Option<f64>>,
}

/// `scores[i][k]` is any per-class score that increases with confidence in
/// class `k` (probabilities, margins, vote shares).
pub fn evaluate(
    y_true: &[LabelId],
    y_pred: &[LabelId],
    scores: &[Vec<f64>],
    n_classes: usize,
) -> Result<EvaluationReport> {
    let confusion = confusion_matrix(y_true, y_pred, n_classes)?;
    let prf = precision_recall_f1(&confusion);
    let per_class_auroc = per_class_ovr_auroc(y_true, scores, n_classes).unwrap_or_else(|_| vec![None; n_classes]);
    let roc = if n_classes == 2 {
        let ind: Vec<bool> = y_true.iter().map(|&y| y == 1).collect();
        let col: Vec<f64> = scores.iter().map(|r| r[1]).collect();
        roc_curve(&ind, &col).ok()
    } else {
        micro_ovr_roc(y_true, scores, n_classes).ok()
    };
    let defined: Vec<f64> = per_class_auroc.iter().flatten().copied().collect();
    let macro_auroc = (defined.len() == n_classes).then(|| defined.iter().sum::<f64>() / n_classes as f64);
    Ok(EvaluationReport {
        n_samples: y_true.len(),
        accuracy: confusion.accuracy(),
        weighted_f1: prf.weighted_avg.f1,
        auroc: roc.as_ref().map(|r| r.auc),
        roc,
        confusion,
        prf,
        macro_auroc,
        per_class_auroc,
    })
}

/// `fpr,tpr,threshold` rows for plotting.
pub fn roc_to_csv(curve: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in &curve.points {
        out.push_str(&format!("{},{},{}\n", p.fpr, p.tpr, p.threshold));
    }
    out
}
