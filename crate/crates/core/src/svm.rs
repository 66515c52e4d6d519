//! Soft-margin SVMs trained on the hinge loss.
//!
//! The linear kernel is trained in the primal by stochastic subgradient steps
//! `eta_t = 1 / (lambda t)`, `lambda = 1 / (C n)`, on the bias-augmented input
//! `[x, 1]`. At each epoch end the primal objective
//! `0.5 ||w||^2 + C sum_i s_i max(0, 1 - y_i f(x_i))` is evaluated and the
//! epoch is kept only if it did not increase the objective; otherwise the
//! iterate falls back to the last kept one and the schedule continues.
//!
//! Other kernels use dual coordinate ascent on
//! `max sum a_i - 0.5 sum_ij a_i a_j y_i y_j K_ij`, `0 <= a_i <= C s_i`,
//! followed by an explicit bias from the KKT conditions.
//!
//! More than two classes are handled one-vs-one; `f(x) >= 0` votes for the
//! higher class id of the pair and vote ties go to the lowest class id.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::linear::class_weights;
use crate::seeds::{child_seed, rng, Stream};
use crate::{ClassWeightMode, LabelId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Polynomial,
    Rbf,
    Sigmoid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// `1 / (D * var(X_train))`, with var over every entry of `X_train`.
    Scale,
    /// `1 / D`.
    Auto,
    Value(f64),
}

impl Serialize for Gamma {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Gamma::Scale => s.serialize_str("scale"),
            Gamma::Auto => s.serialize_str("auto"),
            Gamma::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Gamma {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Value(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Name(n) if n == "scale" => Ok(Gamma::Scale),
            Repr::Name(n) if n == "auto" => Ok(Gamma::Auto),
            Repr::Name(n) => Err(serde::de::Error::custom(format!("unknown gamma `{n}`"))),
            Repr::Value(v) if v.is_finite() && v > 0.0 => Ok(Gamma::Value(v)),
            Repr::Value(v) => Err(serde::de::Error::custom(format!("gamma must be positive, got {v}"))),
        }
    }
}

/// `linear: x.z`, `polynomial: (x.z + coef0)^degree`,
/// `rbf: exp(-gamma ||x - z||^2)`, `sigmoid: tanh(alpha x.z + coef0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    #[serde(default = "default_gamma")]
    pub gamma: Gamma,
    #[serde(default = "default_degree")]
    pub degree: u32,
    #[serde(default)]
    pub coef0: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_gamma() -> Gamma {
    Gamma::Scale
}
fn default_degree() -> u32 {
    3
}
fn default_alpha() -> f64 {
    1.0
}

impl KernelSpec {
    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            gamma: Gamma::Scale,
            degree: 3,
            coef0: 0.0,
            alpha: 1.0,
        }
    }

    pub fn rbf(gamma: Gamma) -> Self {
        KernelSpec {
            kind: KernelKind::Rbf,
            gamma,
            ..Self::linear()
        }
    }

    pub fn polynomial(degree: u32, coef0: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Polynomial,
            degree,
            coef0,
            ..Self::linear()
        }
    }

    pub fn sigmoid(alpha: f64, coef0: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Sigmoid,
            alpha,
            coef0,
            ..Self::linear()
        }
    }

    /// Replaces `scale`/`auto` with a number computed from the training rows.
    pub fn resolve(&self, x: &[SparseVector], dim: usize) -> KernelSpec {
        let d = dim.max(1) as f64;
        let gamma = match self.gamma {
            Gamma::Value(v) => v,
            Gamma::Auto => 1.0 / d,
            Gamma::Scale => {
                let count = x.len() as f64 * d;
                let (sum, sum_sq) = x.iter().fold((0.0, 0.0), |(s, q), v| {
                    (s + v.values().iter().sum::<f64>(), q + v.norm_sq())
                });
                let var = if count > 0.0 { sum_sq / count - (sum / count).powi(2) } else { 0.0 };
                if var > 0.0 {
                    1.0 / (d * var)
                } else {
                    1.0
                }
            }
        };
        KernelSpec {
            gamma: Gamma::Value(gamma),
            ..*self
        }
    }

    fn gamma_value(&self) -> Result<f64> {
        match self.gamma {
            Gamma::Value(v) => Ok(v),
            _ if self.kind != KernelKind::Rbf => Ok(0.0),
            _ => Err(Error::UnresolvedGamma),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::InvalidConfig("polynomial degree must be >= 1".into()));
        }
        if !self.coef0.is_finite() || !self.alpha.is_finite() {
            return Err(Error::InvalidConfig("kernel constants must be finite".into()));
        }
        Ok(())
    }

    /// Kernel from a dot product and the two squared norms.
    #[inline]
    fn from_parts(&self, gamma: f64, dot: f64, nx: f64, nz: f64) -> f64 {
        match self.kind {
            KernelKind::Linear => dot,
            KernelKind::Polynomial => (dot + self.coef0).powi(self.degree as i32),
            KernelKind::Rbf => (-gamma * (nx + nz - 2.0 * dot).max(0.0)).exp(),
            KernelKind::Sigmoid => (self.alpha * dot + self.coef0).tanh(),
        }
    }

    fn eval_sparse(&self, gamma: f64, x: &SparseVector, nx: f64, z: &SparseVector, nz: f64) -> f64 {
        self.from_parts(gamma, x.dot(z), nx, nz)
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], z: &[f64]) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: z.len(),
        });
    }
    let gamma = spec.gamma_value()?;
    let dot = x.iter().zip(z).map(|(a, b)| a * b).sum();
    if spec.kind == KernelKind::Rbf {
        let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b).powi(2)).sum();
        return Ok((-gamma * d2).exp());
    }
    Ok(spec.from_parts(gamma, dot, 0.0, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub c: f64,
    pub kernel: KernelSpec,
    pub class_weight: ClassWeightMode,
    /// Epoch budget of either solver.
    pub epochs: usize,
    /// Dual solver stops early once every projected gradient is below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            kernel: KernelSpec::linear(),
            class_weight: ClassWeightMode::None,
            epochs: 50,
            tol: 1e-3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "lowercase")]
pub enum BinaryMachine {
    /// `f(x) = w.x + b` (b trained as the weight of a constant feature).
    Primal { w: Vec<f64>, b: f64 },
    /// `f(x) = sum_i alpha_i y_i K(sv_i, x) + b` over samples with `alpha_i > 0`.
    Dual {
        support: Vec<SparseVector>,
        alpha: Vec<f64>,
        y: Vec<f64>,
        /// `C * weight(class of sample)`, the box each alpha lives in.
        upper: Vec<f64>,
        b: f64,
    },
}

/// One binary sub-problem: `f(x) >= 0` predicts `positive`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMachine {
    pub negative: LabelId,
    pub positive: LabelId,
    pub machine: BinaryMachine,
    /// Primal objective after each kept epoch (primal solver) or the dual
    /// objective per epoch (dual solver).
    pub objective_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    /// Kernel with gamma resolved.
    pub kernel: KernelSpec,
    pub c: f64,
    pub class_weights: Vec<f64>,
    pub n_classes: usize,
    pub n_features: usize,
    pub pairs: Vec<PairMachine>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    /// One margin per pair, in `model.pairs` order.
    pub margins: Vec<f64>,
    pub votes: Vec<usize>,
    pub class: LabelId,
}

fn check_inputs(x: &[SparseVector], y: &[LabelId], n_classes: usize) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let dim = x[0].dim();
    for (row, v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row });
        }
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.dim(),
            });
        }
    }
    if let Some(&label) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::LabelOutOfRange { label, n_classes });
    }
    Ok(dim)
}

pub fn fit_svm(x: &[SparseVector], y: &[LabelId], n_classes: usize, config: &SvmConfig) -> Result<SvmModel> {
    if !(config.c > 0.0) || config.epochs == 0 {
        return Err(Error::InvalidConfig("SVM needs C > 0 and at least one epoch".into()));
    }
    config.kernel.validate()?;
    let dim = check_inputs(x, y, n_classes)?;
    let mut present: Vec<LabelId> = y.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::SingleClass(present.len()));
    }
    let weights = class_weights(y, n_classes, config.class_weight)?;
    let kernel = config.kernel.resolve(x, dim);
    let mut pair_list = Vec::new();
    for (i, &a) in present.iter().enumerate() {
        for &b in &present[i + 1..] {
            pair_list.push((a, b));
        }
    }
    let pairs = pair_list
        .par_iter()
        .enumerate()
        .map(|(p, &(a, b))| {
            let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == a || y[i] == b).collect();
            let xs: Vec<&SparseVector> = rows.iter().map(|&i| &x[i]).collect();
            let ys: Vec<f64> = rows.iter().map(|&i| if y[i] == b { 1.0 } else { -1.0 }).collect();
            let upper: Vec<f64> = rows.iter().map(|&i| config.c * weights[y[i]]).collect();
            let seed = child_seed(config.seed, Stream::Shuffle, p as u64);
            let (machine, trace) = if kernel.kind == KernelKind::Linear {
                fit_primal(&xs, &ys, &upper, dim, config, seed)
            } else {
                fit_dual(&xs, &ys, &upper, &kernel, config, seed)?
            };
            Ok(PairMachine {
                negative: a,
                positive: b,
                machine,
                objective_trace: trace,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SvmModel {
        kernel,
        c: config.c,
        class_weights: weights,
        n_classes,
        n_features: dim,
        pairs,
    })
}

/// `0.5 ||[w, b]||^2 + sum_i upper_i * hinge(y_i (w.x_i + b))`, where
/// `upper_i = C * s_i`. The bias is penalized because it is trained as an
/// augmented weight.
pub fn primal_objective(w: &[f64], b: f64, x: &[&SparseVector], y: &[f64], upper: &[f64]) -> f64 {
    let reg = 0.5 * (w.iter().map(|v| v * v).sum::<f64>() + b * b);
    let loss: f64 = x
        .iter()
        .zip(y)
        .zip(upper)
        .map(|((xi, yi), u)| u * (1.0 - yi * (xi.dot_dense(w) + b)).max(0.0))
        .sum();
    reg + loss
}

/// A subgradient of [`primal_objective`] w.r.t. `(w, b)`, taking 0 for the
/// hinge at its kink.
pub fn primal_subgradient(w: &[f64], b: f64, x: &[&SparseVector], y: &[f64], upper: &[f64]) -> (Vec<f64>, f64) {
    let mut gw = w.to_vec();
    let mut gb = b;
    for ((xi, &yi), &u) in x.iter().zip(y).zip(upper) {
        if yi * (xi.dot_dense(w) + b) < 1.0 {
            xi.axpy_into(-u * yi, &mut gw);
            gb -= u * yi;
        }
    }
    (gw, gb)
}

fn fit_primal(x: &[&SparseVector], y: &[f64], upper: &[f64], dim: usize, config: &SvmConfig, seed: u64) -> (BinaryMachine, Vec<f64>) {
    let n = x.len();
    let lambda = 1.0 / (config.c * n as f64);
    // w = scale * v, so the shrink step (1 - eta lambda) is O(1)
    let mut v = vec![0.0; dim];
    let mut vb = 0.0;
    let mut scale = 1.0;
    let mut best_w = vec![0.0; dim];
    let mut best_b = 0.0;
    let mut best_obj = primal_objective(&best_w, best_b, x, y, upper);
    let mut trace = vec![best_obj];
    let mut order: Vec<usize> = (0..n).collect();
    let mut r = rng(seed);
    let mut t = 1.0f64;
    for _ in 0..config.epochs {
        order.shuffle(&mut r);
        for &i in &order {
            let eta = 1.0 / (lambda * t);
            let margin = y[i] * scale * (x[i].dot_dense(&v) + vb);
            let shrink = 1.0 - eta * lambda;
            if shrink == 0.0 {
                v.iter_mut().for_each(|e| *e = 0.0);
                vb = 0.0;
                scale = 1.0;
            } else {
                scale *= shrink;
            }
            if margin < 1.0 {
                // per-sample weight relative to C; upper_i = C s_i
                let step = eta * (upper[i] / config.c) * y[i] / scale;
                x[i].axpy_into(step, &mut v);
                vb += step;
            }
            if scale < 1e-9 {
                v.iter_mut().for_each(|e| *e *= scale);
                vb *= scale;
                scale = 1.0;
            }
            t += 1.0;
        }
        let w: Vec<f64> = v.iter().map(|e| e * scale).collect();
        let b = vb * scale;
        let obj = primal_objective(&w, b, x, y, upper);
        if obj <= best_obj {
            best_obj = obj;
            best_w = w;
            best_b = b;
        } else {
            v.clone_from(&best_w);
            vb = best_b;
            scale = 1.0;
        }
        trace.push(best_obj);
    }
    (BinaryMachine::Primal { w: best_w, b: best_b }, trace)
}

/// Rows of the kernel matrix, cached in full for small problems.
struct KernelRows<'a> {
    x: &'a [&'a SparseVector],
    norms: Vec<f64>,
    spec: KernelSpec,
    gamma: f64,
    full: Option<Vec<f64>>,
}

const FULL_CACHE_LIMIT: usize = 3000;

impl<'a> KernelRows<'a> {
    fn new(x: &'a [&'a SparseVector], spec: &KernelSpec) -> Result<Self> {
        let gamma = spec.gamma_value()?;
        let norms: Vec<f64> = x.iter().map(|v| v.norm_sq()).collect();
        let n = x.len();
        let mut rows = KernelRows {
            x,
            norms,
            spec: *spec,
            gamma,
            full: None,
        };
        if n <= FULL_CACHE_LIMIT {
            let full: Vec<f64> = (0..n).into_par_iter().flat_map_iter(|i| rows.compute_row(i)).collect();
            rows.full = Some(full);
        }
        Ok(rows)
    }

    fn compute_row(&self, i: usize) -> Vec<f64> {
        (0..self.x.len())
            .map(|j| self.spec.eval_sparse(self.gamma, self.x[i], self.norms[i], self.x[j], self.norms[j]))
            .collect()
    }

    fn row(&self, i: usize) -> std::borrow::Cow<'_, [f64]> {
        let n = self.x.len();
        match &self.full {
            Some(m) => std::borrow::Cow::Borrowed(&m[i * n..(i + 1) * n]),
            None => std::borrow::Cow::Owned(self.compute_row(i)),
        }
    }

    fn diag(&self, i: usize) -> f64 {
        match &self.full {
            Some(m) => m[i * self.x.len() + i],
            None => self.spec.eval_sparse(self.gamma, self.x[i], self.norms[i], self.x[i], self.norms[i]),
        }
    }
}

fn fit_dual(
    x: &[&SparseVector],
    y: &[f64],
    upper: &[f64],
    spec: &KernelSpec,
    config: &SvmConfig,
    seed: u64,
) -> Result<(BinaryMachine, Vec<f64>)> {
    let n = x.len();
    let k = KernelRows::new(x, spec)?;
    let diag: Vec<f64> = (0..n).map(|i| k.diag(i).max(1e-12)).collect();
    let mut alpha = vec![0.0; n];
    // f_i = sum_j alpha_j y_j K_ij
    let mut f = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut r = rng(seed);
    let mut trace = Vec::new();
    for _ in 0..config.epochs {
        order.shuffle(&mut r);
        let mut max_violation = 0.0f64;
        for &i in &order {
            let g = y[i] * f[i] - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= upper[i] {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(pg.abs());
            if pg == 0.0 {
                continue;
            }
            let new = (alpha[i] - g / diag[i]).clamp(0.0, upper[i]);
            let delta = new - alpha[i];
            if delta == 0.0 {
                continue;
            }
            alpha[i] = new;
            let row = k.row(i);
            let s = delta * y[i];
            for (fj, kij) in f.iter_mut().zip(row.iter()) {
                *fj += s * kij;
            }
        }
        let dual: f64 = alpha.iter().sum::<f64>() - 0.5 * alpha.iter().zip(y).zip(&f).map(|((a, yi), fi)| a * yi * fi).sum::<f64>();
        trace.push(dual);
        if max_violation < config.tol {
            break;
        }
    }
    let b = kkt_bias(&alpha, y, &f, upper);
    let keep: Vec<usize> = (0..n).filter(|&i| alpha[i] > 0.0).collect();
    Ok((
        BinaryMachine::Dual {
            support: keep.iter().map(|&i| x[i].clone()).collect(),
            alpha: keep.iter().map(|&i| alpha[i]).collect(),
            y: keep.iter().map(|&i| y[i]).collect(),
            upper: keep.iter().map(|&i| upper[i]).collect(),
            b,
        },
        trace,
    ))
}

/// Average of `y_i - f_i` over free support vectors; without any, the middle
/// of the interval the bound constraints leave for `b`.
fn kkt_bias(alpha: &[f64], y: &[f64], f: &[f64], upper: &[f64]) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..alpha.len() {
        let r = y[i] - f[i];
        if alpha[i] > 0.0 && alpha[i] < upper[i] {
            sum += r;
            count += 1;
        } else {
            // alpha = 0 needs y (f + b) >= 1; alpha = upper needs y (f + b) <= 1
            let at_zero = alpha[i] <= 0.0;
            if (y[i] > 0.0) == at_zero {
                lo = lo.max(r);
            } else {
                hi = hi.min(r);
            }
        }
    }
    if count > 0 {
        sum / count as f64
    } else if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        0.0
    }
}

impl BinaryMachine {
    fn margin(&self, spec: &KernelSpec, x: &SparseVector) -> f64 {
        match self {
            BinaryMachine::Primal { w, b } => x.dot_dense(w) + b,
            BinaryMachine::Dual {
                support, alpha, y, b, ..
            } => {
                let gamma = spec.gamma_value().unwrap_or(1.0);
                let nx = x.norm_sq();
                support
                    .iter()
                    .zip(alpha)
                    .zip(y)
                    .map(|((sv, a), yi)| a * yi * spec.eval_sparse(gamma, sv, sv.norm_sq(), x, nx))
                    .sum::<f64>()
                    + b
            }
        }
    }
}

impl SvmModel {
    pub fn decision_function(&self, x: &SparseVector) -> Result<Decision> {
        if x.dim() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.dim(),
            });
        }
        let mut votes = vec![0usize; self.n_classes];
        let margins: Vec<f64> = self
            .pairs
            .iter()
            .map(|p| {
                let m = p.machine.margin(&self.kernel, x);
                votes[if m >= 0.0 { p.positive } else { p.negative }] += 1;
                m
            })
            .collect();
        let class = crate::linear::argmax(&votes.iter().map(|&v| v as f64).collect::<Vec<_>>());
        Ok(Decision { margins, votes, class })
    }

    pub fn predict(&self, x: &SparseVector) -> Result<LabelId> {
        Ok(self.decision_function(x)?.class)
    }

    /// Per-class ranking scores. Binary: `[-f, f]`. Otherwise votes plus the
    /// summed pair margins squashed into (-1/3, 1/3), so votes dominate and
    /// margins break ties.
    pub fn class_scores(&self, x: &SparseVector) -> Result<Vec<f64>> {
        let d = self.decision_function(x)?;
        if self.n_classes == 2 && self.pairs.len() == 1 {
            let f = d.margins[0];
            return Ok(vec![-f, f]);
        }
        let mut conf = vec![0.0; self.n_classes];
        for (p, m) in self.pairs.iter().zip(&d.margins) {
            conf[p.positive] += m;
            conf[p.negative] -= m;
        }
        Ok(d.votes
            .iter()
            .zip(conf)
            .map(|(&v, c)| v as f64 + c / (3.0 * (c.abs() + 1.0)))
            .collect())
    }

    /// Structural checks for models read from disk.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidModel(format!("svm: {m}")));
        if self.n_classes < 2 || self.class_weights.len() != self.n_classes {
            return bad("class count");
        }
        self.kernel.validate()?;
        if self.kernel.kind == KernelKind::Rbf && !matches!(self.kernel.gamma, Gamma::Value(_)) {
            return bad("rbf gamma unresolved");
        }
        if self.pairs.is_empty() {
            return bad("no sub-models");
        }
        for p in &self.pairs {
            if p.negative >= p.positive || p.positive >= self.n_classes {
                return bad("pair classes");
            }
            match &p.machine {
                BinaryMachine::Primal { w, b } => {
                    if w.len() != self.n_features || !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
                        return bad("primal weights");
                    }
                }
                BinaryMachine::Dual {
                    support,
                    alpha,
                    y,
                    upper,
                    b,
                } => {
                    let n = support.len();
                    if alpha.len() != n || y.len() != n || upper.len() != n || !b.is_finite() {
                        return bad("dual lengths");
                    }
                    for sv in support {
                        sv.validate()?;
                        if sv.dim() != self.n_features || !sv.is_finite() {
                            return bad("support vector dimension");
                        }
                    }
                    for i in 0..n {
                        if !(alpha[i] >= 0.0 && alpha[i] <= upper[i] && upper[i].is_finite()) || y[i].abs() != 1.0 {
                            return bad("dual coefficient outside its box");
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
