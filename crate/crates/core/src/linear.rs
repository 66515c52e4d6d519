//! Binary (sigmoid) and multinomial (softmax) logistic regression.
//!
//! Objective: `(1/n) * sum_i w[y_i] * CE_i + lambda * ||W||^2`, with
//! `lambda = 1/C`, the bias unpenalized and `w` the per-class weights.
//! Trained by full-batch gradient descent with Armijo backtracking from zero;
//! each line search starts from the Barzilai-Borwein step of the previous
//! iteration, and only accepted (sufficient-decrease) steps are taken.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::{ClassWeightMode, LabelId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearScheme {
    /// One weight row; `P(class 1) = sigmoid(w.x + b)`.
    Binary,
    /// One row per class, softmax over the logits.
    Multinomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModelParams {
    pub scheme: LinearScheme,
    pub n_features: usize,
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    /// Inverse regularization strength.
    pub c: f64,
    pub class_weight: ClassWeightMode,
    pub max_iter: usize,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            c: 1.0,
            class_weight: ClassWeightMode::None,
            max_iter: 1000,
            tol: 1e-6,
        }
    }
}

/// `none` gives all ones; `balanced` gives `N / (K * N_k)`.
pub fn class_weights(labels: &[LabelId], n_classes: usize, mode: ClassWeightMode) -> Result<Vec<f64>> {
    let mut counts = vec![0usize; n_classes];
    for &y in labels {
        if y >= n_classes {
            return Err(Error::LabelOutOfRange { label: y, n_classes });
        }
        counts[y] += 1;
    }
    match mode {
        ClassWeightMode::None => Ok(vec![1.0; n_classes]),
        ClassWeightMode::Balanced => {
            let n = labels.len() as f64;
            counts
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    if c == 0 {
                        Err(Error::AbsentClass(k))
                    } else {
                        Ok(n / (n_classes as f64 * c as f64))
                    }
                })
                .collect()
        }
    }
}

impl LinearModelParams {
    pub fn zeros(scheme: LinearScheme, n_classes: usize, n_features: usize) -> Self {
        let rows = match scheme {
            LinearScheme::Binary => 1,
            LinearScheme::Multinomial => n_classes,
        };
        LinearModelParams {
            scheme,
            n_features,
            weights: vec![vec![0.0; n_features]; rows],
            bias: vec![0.0; rows],
        }
    }

    pub fn n_classes(&self) -> usize {
        match self.scheme {
            LinearScheme::Binary => 2,
            LinearScheme::Multinomial => self.weights.len(),
        }
    }

    fn logits(&self, x: &SparseVector) -> Vec<f64> {
        self.weights.iter().zip(&self.bias).map(|(w, b)| x.dot_dense(w) + b).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let rows = self.weights.len();
        let ok_rows = match self.scheme {
            LinearScheme::Binary => rows == 1,
            LinearScheme::Multinomial => rows >= 2,
        };
        if !ok_rows || self.bias.len() != rows {
            return Err(Error::InvalidModel("logistic weight/bias shape".into()));
        }
        if self.weights.iter().any(|w| w.len() != self.n_features) {
            return Err(Error::InvalidModel("logistic weight row length".into()));
        }
        if self.weights.iter().flatten().chain(&self.bias).any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("non-finite logistic parameter".into()));
        }
        Ok(())
    }

    fn squared_norm(&self) -> f64 {
        self.weights.iter().flatten().map(|w| w * w).sum()
    }

    /// Frobenius norm of the weight matrix (bias excluded).
    pub fn weight_norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    fn axpy(&mut self, step: f64, dir: &Gradient) {
        for (w, g) in self.weights.iter_mut().zip(&dir.weights) {
            for (a, b) in w.iter_mut().zip(g) {
                *a += step * b;
            }
        }
        for (a, b) in self.bias.iter_mut().zip(&dir.bias) {
            *a += step * b;
        }
    }
}

/// Same shape as the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl Gradient {
    pub fn norm_sq(&self) -> f64 {
        self.weights.iter().flatten().chain(&self.bias).map(|g| g * g).sum()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Softmax with max subtraction.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - m).exp()).collect();
    let s: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / s).collect()
}

fn log_sum_exp(logits: &[f64]) -> f64 {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + logits.iter().map(|z| (z - m).exp()).sum::<f64>().ln()
}

/// Per-sample loss and `dLoss/dlogit`.
fn sample_terms(params: &LinearModelParams, x: &SparseVector, y: LabelId) -> (f64, Vec<f64>) {
    let z = params.logits(x);
    match params.scheme {
        LinearScheme::Binary => {
            let t = z[0];
            let loss = if y == 1 { softplus(-t) } else { softplus(t) };
            (loss, vec![sigmoid(t) - y as f64])
        }
        LinearScheme::Multinomial => {
            let loss = log_sum_exp(&z) - z[y];
            let mut d = softmax(&z);
            d[y] -= 1.0;
            (loss, d)
        }
    }
}

fn objective(params: &LinearModelParams, x: &[SparseVector], y: &[LabelId], lambda: f64, cw: &[f64]) -> f64 {
    let n = x.len() as f64;
    let data: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| {
            let z = params.logits(xi);
            let l = match params.scheme {
                LinearScheme::Binary if yi == 1 => softplus(-z[0]),
                LinearScheme::Binary => softplus(z[0]),
                LinearScheme::Multinomial => log_sum_exp(&z) - z[yi],
            };
            cw[yi] * l
        })
        .sum();
    data / n + lambda * params.squared_norm()
}

/// Weighted mean cross-entropy plus `lambda * ||W||^2`, and its exact gradient.
pub fn loss_and_gradient(
    params: &LinearModelParams,
    x: &[SparseVector],
    y: &[LabelId],
    lambda: f64,
    class_weights: &[f64],
) -> (f64, Gradient) {
    let n = x.len() as f64;
    let mut grad = Gradient {
        weights: vec![vec![0.0; params.n_features]; params.weights.len()],
        bias: vec![0.0; params.bias.len()],
    };
    let mut loss = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let (l, dz) = sample_terms(params, xi, yi);
        let w = class_weights[yi];
        loss += w * l;
        for (k, d) in dz.into_iter().enumerate() {
            let s = w * d / n;
            xi.axpy_into(s, &mut grad.weights[k]);
            grad.bias[k] += s;
        }
    }
    for (g, w) in grad.weights.iter_mut().zip(&params.weights) {
        for (gj, wj) in g.iter_mut().zip(w) {
            *gj += 2.0 * lambda * wj;
        }
    }
    (loss / n + lambda * params.squared_norm(), grad)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub params: LinearModelParams,
    /// Objective after each accepted step, starting with the zero model.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_gradient_norm: f64,
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
    for (row, xi) in x.iter().enumerate() {
        if !xi.is_finite() {
            return Err(Error::NonFinite { row });
        }
        if xi.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: xi.dim(),
            });
        }
    }
    let mut present = vec![false; n_classes];
    for &yi in y {
        if yi >= n_classes {
            return Err(Error::LabelOutOfRange { label: yi, n_classes });
        }
        present[yi] = true;
    }
    let distinct = present.iter().filter(|&&p| p).count();
    if n_classes < 2 || distinct < 2 {
        return Err(Error::SingleClass(distinct));
    }
    Ok(dim)
}

fn flat(p: &LinearModelParams) -> impl Iterator<Item = f64> + '_ {
    p.weights.iter().flatten().chain(&p.bias).copied()
}

fn flat_grad(g: &Gradient) -> impl Iterator<Item = f64> + '_ {
    g.weights.iter().flatten().chain(&g.bias).copied()
}

/// Penalty weight on the mean loss for inverse strength `c` over `n`
/// samples: minimizing `mean loss + lambda ||W||^2` with `lambda = 1 / (2 c n)`
/// is minimizing `c * sum loss + ||W||^2 / 2`.
pub fn penalty_for(c: f64, n: usize) -> f64 {
    1.0 / (2.0 * c * n as f64)
}

/// Sigmoid model for `n_classes == 2`, softmax otherwise.
pub fn fit_logistic(x: &[SparseVector], y: &[LabelId], n_classes: usize, config: &LogisticConfig) -> Result<LogisticFit> {
    if !(config.c > 0.0) || config.max_iter == 0 {
        return Err(Error::InvalidConfig("logistic regression needs C > 0 and max_iter >= 1".into()));
    }
    let dim = check_inputs(x, y, n_classes)?;
    let cw = class_weights(y, n_classes, config.class_weight)?;
    let lambda = penalty_for(config.c, x.len());
    let scheme = if n_classes == 2 {
        LinearScheme::Binary
    } else {
        LinearScheme::Multinomial
    };
    let mut params = LinearModelParams::zeros(scheme, n_classes, dim);
    let (mut f, mut g) = loss_and_gradient(&params, x, y, lambda, &cw);
    let mut trace = vec![f];
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iter {
        let g2 = g.norm_sq();
        if g2.sqrt() < config.tol {
            converged = true;
            break;
        }
        let mut accepted = None;
        while step > 1e-16 {
            let mut cand = params.clone();
            cand.axpy(-step, &g);
            let fc = objective(&cand, x, y, lambda, &cw);
            if fc <= f - 1e-4 * step * g2 {
                accepted = Some(cand);
                break;
            }
            step *= 0.5;
        }
        // no descent step left at machine precision
        let Some(next) = accepted else { break };
        let (nf, ng) = loss_and_gradient(&next, x, y, lambda, &cw);
        // Barzilai-Borwein trial step <s, s> / <s, dg> for the next line search
        let (mut ss, mut sy) = (0.0, 0.0);
        for ((pn, po), (gn, go)) in flat(&next).zip(flat(&params)).zip(flat_grad(&ng).zip(flat_grad(&g))) {
            let d = pn - po;
            ss += d * d;
            sy += d * (gn - go);
        }
        let bb = ss / sy;
        step = if bb.is_finite() && bb > 0.0 { bb.min(1e6) } else { (step * 2.0).min(1e6) };
        params = next;
        f = nf;
        g = ng;
        trace.push(f);
        iterations += 1;
    }
    if !converged && g.norm_sq().sqrt() < config.tol {
        converged = true;
    }
    Ok(LogisticFit {
        params,
        objective_trace: trace,
        iterations,
        converged,
        final_gradient_norm: g.norm_sq().sqrt(),
    })
}

/// Class probabilities; for the binary scheme `[1 - p, p]`. Components are
/// strictly inside (0, 1) until a logit gap exceeds roughly 36, where f64
/// saturates.
pub fn predict_proba(params: &LinearModelParams, x: &SparseVector) -> Result<Vec<f64>> {
    if x.dim() != params.n_features {
        return Err(Error::DimensionMismatch {
            expected: params.n_features,
            got: x.dim(),
        });
    }
    let z = params.logits(x);
    Ok(match params.scheme {
        LinearScheme::Binary => {
            let p = sigmoid(z[0]);
            vec![1.0 - p, p]
        }
        LinearScheme::Multinomial => softmax(&z),
    })
}

/// Most probable class; ties go to the lowest id.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn rows(d: &[&[f64]]) -> Vec<SparseVector> {
        d.iter().map(|r| SparseVector::from_dense(r)).collect()
    }

    #[test]
    fn balanced_weights() {
        let y: Vec<usize> = (0..100).map(|i| usize::from(i >= 50)).collect();
        assert_eq!(class_weights(&y, 2, ClassWeightMode::Balanced).unwrap(), vec![1.0, 1.0]);
        let y: Vec<usize> = (0..100).map(|i| usize::from(i >= 75)).collect();
        let w = class_weights(&y, 2, ClassWeightMode::Balanced).unwrap();
        // 100 / (2 * 75), 100 / (2 * 25)
        assert!((w[0] - 0.666_666_666_666_666_6).abs() < 1e-15);
        assert_eq!(w[1], 2.0);
        assert_eq!(class_weights(&y, 3, ClassWeightMode::None).unwrap(), vec![1.0; 3]);
        assert!(matches!(
            class_weights(&y, 3, ClassWeightMode::Balanced),
            Err(Error::AbsentClass(2))
        ));
    }

    #[test]
    fn zero_model_loss_is_ln2() {
        let x = rows(&[&[1.0, 0.5], &[-0.3, 2.0]]);
        let p = LinearModelParams::zeros(LinearScheme::Binary, 2, 2);
        let (l, _) = loss_and_gradient(&p, &x, &[0, 1], 0.7, &[1.0, 1.0]);
        assert!((l - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn penalty_gradient_is_two_lambda_w() {
        let x = rows(&[&[1.0, 0.5], &[-0.3, 2.0]]);
        let mut p = LinearModelParams::zeros(LinearScheme::Multinomial, 3, 2);
        p.weights = vec![vec![0.3, -1.2], vec![0.5, 0.1], vec![-2.0, 0.7]];
        let lambda = 3.5;
        let (_, g0) = loss_and_gradient(&p, &x, &[0, 2], 0.0, &[1.0; 3]);
        let (_, g1) = loss_and_gradient(&p, &x, &[0, 2], lambda, &[1.0; 3]);
        for k in 0..3 {
            for j in 0..2 {
                let diff = g1.weights[k][j] - g0.weights[k][j];
                assert!((diff - 2.0 * lambda * p.weights[k][j]).abs() < 1e-12);
            }
            assert_eq!(g1.bias[k], g0.bias[k]);
        }
    }

    /// Central differences over every parameter; returns the relative error
    /// `||analytic - numeric|| / max(||analytic||, ||numeric||)`.
    pub(crate) fn finite_difference_error(p: &LinearModelParams, x: &[SparseVector], y: &[usize], lambda: f64, cw: &[f64]) -> f64 {
        let (_, g) = loss_and_gradient(p, x, y, lambda, cw);
        let h = 1e-6;
        let (mut num, mut ana) = (Vec::new(), Vec::new());
        for k in 0..p.weights.len() {
            for j in 0..p.n_features {
                let mut a = p.clone();
                a.weights[k][j] += h;
                let mut b = p.clone();
                b.weights[k][j] -= h;
                num.push((loss_and_gradient(&a, x, y, lambda, cw).0 - loss_and_gradient(&b, x, y, lambda, cw).0) / (2.0 * h));
                ana.push(g.weights[k][j]);
            }
            let mut a = p.clone();
            a.bias[k] += h;
            let mut b = p.clone();
            b.bias[k] -= h;
            num.push((loss_and_gradient(&a, x, y, lambda, cw).0 - loss_and_gradient(&b, x, y, lambda, cw).0) / (2.0 * h));
            ana.push(g.bias[k]);
        }
        let diff: f64 = num.iter().zip(&ana).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale = num.iter().map(|v| v * v).sum::<f64>().sqrt().max(ana.iter().map(|v| v * v).sum::<f64>().sqrt());
        diff / scale.max(1e-300)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = crate::seeds::rng(5);
        for k in [2usize, 4] {
            let scheme = if k == 2 { LinearScheme::Binary } else { LinearScheme::Multinomial };
            let n = 12;
            let d = 5;
            let x: Vec<SparseVector> = (0..n)
                .map(|_| SparseVector::from_dense(&(0..d).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()))
                .collect();
            let y: Vec<usize> = (0..n).map(|i| i % k).collect();
            let mut p = LinearModelParams::zeros(scheme, k, d);
            for w in p.weights.iter_mut().flatten().chain(p.bias.iter_mut()) {
                *w = rng.gen_range(-0.5..0.5);
            }
            let cw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.5..2.0)).collect();
            assert!(finite_difference_error(&p, &x, &y, 0.3, &cw) < 1e-6);
        }
    }

    #[test]
    fn separable_line_fits_perfectly() {
        let x = rows(&[&[-2.0], &[-1.5], &[-1.0], &[-0.5], &[0.5], &[1.0], &[1.5], &[2.0]]);
        let y = [0, 0, 0, 0, 1, 1, 1, 1];
        let fit = fit_logistic(&x, &y, 2, &LogisticConfig { c: 10.0, ..Default::default() }).unwrap();
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(argmax(&predict_proba(&fit.params, xi).unwrap()), yi);
        }
        assert!(fit.converged);
    }

    #[test]
    fn duplicated_rows_match_doubled_c() {
        // C scales the summed loss, so doubling every row is doubling C.
        let x = rows(&[&[0.2, 1.0], &[1.0, -0.4], &[-0.7, 0.3], &[0.1, 0.1], &[-1.0, -1.0]]);
        let y = [1, 0, 2, 1, 0];
        let a = fit_logistic(&x, &y, 3, &LogisticConfig { c: 2.0, ..Default::default() }).unwrap();
        let x2: Vec<_> = x.iter().chain(&x).cloned().collect();
        let y2: Vec<_> = y.iter().chain(&y).copied().collect();
        let b = fit_logistic(&x2, &y2, 3, &LogisticConfig { c: 1.0, ..Default::default() }).unwrap();
        for (ra, rb) in a.params.weights.iter().zip(&b.params.weights) {
            for (u, v) in ra.iter().zip(rb) {
                assert!((u - v).abs() < 1e-7, "{u} vs {v}");
            }
        }
    }

    #[test]
    fn optimum_beats_random_probes() {
        let x = rows(&[&[0.9, 0.1], &[0.8, 0.4], &[0.2, 0.9], &[0.1, 0.7], &[0.5, 0.5], &[0.6, 0.2]]);
        let y = [0, 0, 1, 1, 1, 0];
        let cfg = LogisticConfig { c: 1.0, ..Default::default() };
        let fit = fit_logistic(&x, &y, 2, &cfg).unwrap();
        let lambda = penalty_for(1.0, x.len());
        let (best, _) = loss_and_gradient(&fit.params, &x, &y, lambda, &[1.0, 1.0]);
        let mut rng = crate::seeds::rng(99);
        for _ in 0..100 {
            let mut p = fit.params.clone();
            for w in p.weights.iter_mut().flatten().chain(p.bias.iter_mut()) {
                *w = rng.gen_range(-3.0..3.0);
            }
            let (l, _) = loss_and_gradient(&p, &x, &y, lambda, &[1.0, 1.0]);
            assert!(best <= l + 1e-12);
        }
    }

    #[test]
    fn objective_never_increases() {
        let mut rng = crate::seeds::rng(3);
        let x: Vec<SparseVector> = (0..40)
            .map(|_| SparseVector::from_dense(&(0..6).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()))
            .collect();
        let y: Vec<usize> = (0..40).map(|_| rng.gen_range(0..3)).collect();
        let fit = fit_logistic(&x, &y, 3, &LogisticConfig { c: 5.0, class_weight: ClassWeightMode::Balanced, ..Default::default() }).unwrap();
        for w in fit.objective_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn stronger_penalty_shrinks_weights() {
        let mut rng = crate::seeds::rng(8);
        let x: Vec<SparseVector> = (0..30)
            .map(|_| SparseVector::from_dense(&(0..4).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()))
            .collect();
        let y: Vec<usize> = x.iter().map(|v| usize::from(v.to_dense()[0] + 0.3 * v.to_dense()[1] > 0.0)).collect();
        let mut last = f64::INFINITY;
        for c in [10.0, 1.0, 0.1, 0.01] {
            let fit = fit_logistic(&x, &y, 2, &LogisticConfig { c, tol: 1e-7, max_iter: 5000, ..Default::default() }).unwrap();
            assert!(fit.converged, "C={c} it={} g={}", fit.iterations, fit.final_gradient_norm);
            let norm = fit.params.weight_norm();
            assert!(norm <= last + 1e-6);
            last = norm;
        }
    }

    #[test]
    fn proba_conventions() {
        let p = LinearModelParams::zeros(LinearScheme::Multinomial, 4, 3);
        let x = SparseVector::from_dense(&[1.0, -2.0, 0.5]);
        assert_eq!(predict_proba(&p, &x).unwrap(), vec![0.25; 4]);
        let b = LinearModelParams::zeros(LinearScheme::Binary, 2, 3);
        assert_eq!(predict_proba(&b, &x).unwrap(), vec![0.5, 0.5]);
        let z = [0.3, -1.0, 2.5];
        let shifted: Vec<f64> = z.iter().map(|v| v + 123.0).collect();
        let (a, s) = (softmax(&z), softmax(&shifted));
        for (u, v) in a.iter().zip(&s) {
            assert!((u - v).abs() < 1e-15);
        }
        assert!(matches!(
            predict_proba(&p, &SparseVector::from_dense(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = rows(&[&[1.0], &[f64::NAN]]);
        assert!(matches!(
            fit_logistic(&x, &[0, 1], 2, &LogisticConfig::default()),
            Err(Error::NonFinite { row: 1 })
        ));
        let x = rows(&[&[1.0], &[2.0]]);
        assert!(matches!(
            fit_logistic(&x, &[1, 1], 2, &LogisticConfig::default()),
            Err(Error::SingleClass(1))
        ));
    }

    proptest::proptest! {
        #[test]
        fn probabilities_normalized(z in proptest::collection::vec(-15.0f64..15.0, 1..6),
                                    x in proptest::collection::vec(-1.0f64..1.0, 3)) {
            let s = softmax(&z);
            proptest::prop_assert!((s.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            proptest::prop_assert!(s.iter().all(|&p| p > 0.0 && p < 1.0 || z.len() == 1));
            let mut b = LinearModelParams::zeros(LinearScheme::Binary, 2, 3);
            b.weights[0] = vec![z[0], 1.0, -1.0];
            let p = predict_proba(&b, &SparseVector::from_dense(&x)).unwrap();
            proptest::prop_assert!((p[0] + p[1] - 1.0).abs() <= 1e-12);
            proptest::prop_assert!(p[1] > 0.0 && p[1] < 1.0);
        }
    }
}
