//! Multinomial logistic regression over sparse design matrices.
//!
//! The objective is the summed cross-entropy plus `l2_strength / 2` times the
//! squared norm of the non-bias weights, divided by the number of rows so the
//! solver tolerances do not depend on the sample count. It is minimised with
//! L-BFGS and an Armijo backtracking line search starting from zero weights.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::Class;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::math;
use crate::sparse::SparseMatrix;
use crate::NUM_CLASSES;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct LogRegConfig {
    pub l2_strength: f64,
    pub max_iter: usize,
    /// Convergence threshold on the max-norm of the gradient.
    pub tol: f64,
    /// The solver is deterministic; the seed is kept so every component of a
    /// run carries one.
    pub seed: u64,
    /// L-BFGS history length.
    pub memory: usize,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            l2_strength: 1.0,
            max_iter: 200,
            tol: 1e-5,
            seed: 0,
            memory: 10,
        }
    }
}

impl LogRegConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_strength >= 0.0 && self.l2_strength.is_finite()) {
            return Err(Error::InvalidConfig("logreg.l2_strength must be a nonnegative number".into()));
        }
        if !(self.tol > 0.0) || self.memory == 0 {
            return Err(Error::InvalidConfig("logreg.tol and logreg.memory must be positive".into()));
        }
        Ok(())
    }
}

/// Weights are `NUM_CLASSES × (n_features + 1)`, the last column being the
/// bias. Rows follow [`Class::ALL`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogRegModel {
    weights: DenseMatrix,
}

impl LogRegModel {
    pub fn zeros(n_features: usize) -> Self {
        Self {
            weights: DenseMatrix::zeros(NUM_CLASSES, n_features + 1),
        }
    }

    pub fn from_weights(weights: DenseMatrix) -> Result<Self> {
        if weights.rows() != NUM_CLASSES || weights.cols() == 0 {
            return Err(Error::DimensionMismatch {
                context: "logreg weights",
                expected: NUM_CLASSES,
                found: weights.rows(),
            });
        }
        if !weights.is_finite() {
            return Err(Error::NonFinite("logreg weights"));
        }
        Ok(Self { weights })
    }

    pub fn n_features(&self) -> usize {
        self.weights.cols() - 1
    }

    pub fn weights(&self) -> &DenseMatrix {
        &self.weights
    }

    pub fn bias(&self, class: usize) -> f64 {
        self.weights[(class, self.n_features())]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegFit {
    pub model: LogRegModel,
    /// Objective at the start and after every accepted step.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegPrediction {
    pub labels: Vec<Class>,
    /// `n × NUM_CLASSES` row-stochastic matrix.
    pub probs: DenseMatrix,
}

fn scores_into(w: &[f64], x: &SparseMatrix, i: usize, out: &mut [f64]) {
    let stride = x.n_cols() + 1;
    for (c, o) in out.iter_mut().enumerate() {
        let row = &w[c * stride..(c + 1) * stride];
        let mut s = row[stride - 1];
        for (j, v) in x.row_iter(i) {
            s += row[j] * v;
        }
        *o = s;
    }
}

/// Scaled objective and its gradient at the flattened weights `w`.
pub fn objective_and_gradient(
    w: &[f64],
    x: &SparseMatrix,
    y: &[Class],
    l2_strength: f64,
    grad: &mut [f64],
) -> f64 {
    let n = x.n_rows();
    let stride = x.n_cols() + 1;
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut scores = [0.0; NUM_CLASSES];
    let mut logp = [0.0; NUM_CLASSES];
    let mut total = 0.0;
    for i in 0..n {
        scores_into(w, x, i, &mut scores);
        math::log_softmax_into(&scores, &mut logp);
        let yi = y[i].index();
        total -= logp[yi];
        for c in 0..NUM_CLASSES {
            let r = math::exp(logp[c]) - if c == yi { 1.0 } else { 0.0 };
            let g = &mut grad[c * stride..(c + 1) * stride];
            for (j, v) in x.row_iter(i) {
                g[j] += r * v;
            }
            g[stride - 1] += r;
        }
    }
    let mut penalty = 0.0;
    for c in 0..NUM_CLASSES {
        for j in 0..stride - 1 {
            let wj = w[c * stride + j];
            penalty += wj * wj;
            grad[c * stride + j] += l2_strength * wj;
        }
    }
    let inv_n = 1.0 / n as f64;
    grad.iter_mut().for_each(|g| *g *= inv_n);
    (total + 0.5 * l2_strength * penalty) * inv_n
}

fn check_inputs(x: &SparseMatrix, y: &[Class]) -> Result<()> {
    if x.n_rows() == 0 {
        return Err(Error::Empty("logreg design matrix"));
    }
    if x.n_rows() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "logreg labels",
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    if !x.values().iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("logreg design matrix"));
    }
    if y.iter().all(|&c| c == y[0]) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub fn train_logreg(x: &SparseMatrix, y: &[Class], config: &LogRegConfig) -> Result<LogRegModel> {
    train_logreg_traced(x, y, config).map(|f| f.model)
}

pub fn train_logreg_traced(x: &SparseMatrix, y: &[Class], config: &LogRegConfig) -> Result<LogRegFit> {
    config.validate()?;
    check_inputs(x, y)?;
    let dim = NUM_CLASSES * (x.n_cols() + 1);
    let lambda = config.l2_strength;
    let mut w = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    let mut f = objective_and_gradient(&w, x, y, lambda, &mut g);
    let mut trace = vec![f];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut w_new = vec![0.0; dim];
    let mut g_new = vec![0.0; dim];
    let mut d = vec![0.0; dim];
    let mut alpha = vec![0.0; config.memory];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iter {
        if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) < config.tol {
            converged = true;
            break;
        }
        // Two-loop recursion for d = -H g.
        d.copy_from_slice(&g);
        for (k, (s, yv, rho)) in history.iter().enumerate().rev() {
            alpha[k] = rho * math::dot(s, &d);
            for (di, yi) in d.iter_mut().zip(yv) {
                *di -= alpha[k] * yi;
            }
        }
        let gamma = match history.back() {
            Some((s, yv, _)) => math::dot(s, yv) / math::dot(yv, yv),
            None => 1.0 / math::norm(&g).max(1.0),
        };
        d.iter_mut().for_each(|v| *v *= gamma);
        for (k, (s, yv, rho)) in history.iter().enumerate() {
            let beta = rho * math::dot(yv, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (alpha[k] - beta) * si;
            }
        }
        d.iter_mut().for_each(|v| *v = -*v);
        let mut slope = math::dot(&g, &d);
        if !(slope < 0.0) {
            history.clear();
            for (di, gi) in d.iter_mut().zip(&g) {
                *di = -gi;
            }
            slope = -math::dot(&g, &g);
        }

        // Armijo backtracking.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            for ((wn, wi), di) in w_new.iter_mut().zip(&w).zip(&d) {
                *wn = wi + step * di;
            }
            let f_new = objective_and_gradient(&w_new, x, y, lambda, &mut g_new);
            if f_new.is_finite() && f_new <= f + 1e-4 * step * slope {
                accepted = Some(f_new);
                break;
            }
            step *= 0.5;
        }
        let Some(f_new) = accepted else {
            // No decrease representable in floating point: at the optimum
            // to working precision.
            converged = true;
            break;
        };
        iterations += 1;
        let s: Vec<f64> = w_new.iter().zip(&w).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = math::dot(&s, &yv);
        if sy > 1e-12 * math::norm(&s) * math::norm(&yv) && sy > 0.0 {
            if history.len() == config.memory {
                history.pop_front();
            }
            history.push_back((s, yv, 1.0 / sy));
        }
        core::mem::swap(&mut w, &mut w_new);
        core::mem::swap(&mut g, &mut g_new);
        f = f_new;
        trace.push(f);
    }
    if !converged && g.iter().fold(0.0f64, |m, v| m.max(v.abs())) < config.tol {
        converged = true;
    }
    let weights = DenseMatrix::from_vec(NUM_CLASSES, x.n_cols() + 1, w)?;
    Ok(LogRegFit {
        model: LogRegModel::from_weights(weights)?,
        objective_trace: trace,
        iterations,
        converged,
    })
}

pub fn predict_logreg(model: &LogRegModel, x: &SparseMatrix) -> Result<LogRegPrediction> {
    if x.n_cols() != model.n_features() {
        return Err(Error::DimensionMismatch {
            context: "logreg features",
            expected: model.n_features(),
            found: x.n_cols(),
        });
    }
    let mut probs = DenseMatrix::zeros(x.n_rows(), NUM_CLASSES);
    let mut labels = Vec::with_capacity(x.n_rows());
    let mut scores = [0.0; NUM_CLASSES];
    let mut logp = [0.0; NUM_CLASSES];
    for i in 0..x.n_rows() {
        scores_into(model.weights.as_slice(), x, i, &mut scores);
        math::log_softmax_into(&scores, &mut logp);
        let row = probs.row_mut(i);
        for c in 0..NUM_CLASSES {
            row[c] = math::exp(logp[c]);
        }
        labels.push(Class::from_index(math::argmax(&scores)).expect("three classes"));
    }
    Ok(LogRegPrediction { labels, probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::sparse::SparseRow;
    use proptest::prelude::*;
    use rand::Rng as _;

    fn toy() -> (SparseMatrix, Vec<Class>) {
        let d = DenseMatrix::from_rows(&[
            vec![1.0, 0.0],
            vec![0.9, 0.2],
            vec![0.0, 1.0],
            vec![0.1, 0.8],
        ])
        .unwrap();
        (
            SparseMatrix::from_dense(&d),
            vec![Class::Racism, Class::Racism, Class::Sexism, Class::Sexism],
        )
    }

    #[test]
    fn separable_toy_is_fit_exactly() {
        let (x, y) = toy();
        let model = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
        let pred = predict_logreg(&model, &x).unwrap();
        assert_eq!(pred.labels, y);
    }

    #[test]
    fn zero_weights_predict_uniform() {
        let (x, _) = toy();
        let pred = predict_logreg(&LogRegModel::zeros(2), &x).unwrap();
        assert!(pred.labels.iter().all(|&c| c == Class::Racism));
        assert!(pred.probs.as_slice().iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn heavy_regularization_falls_back_to_prior() {
        let d = DenseMatrix::from_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![0.5, 0.0],
            vec![0.0, 0.3],
        ])
        .unwrap();
        let x = SparseMatrix::from_dense(&d);
        let y = vec![Class::Clean, Class::Sexism, Class::Clean, Class::Racism, Class::Clean];
        let cfg = LogRegConfig {
            l2_strength: 1e8,
            ..LogRegConfig::default()
        };
        let model = train_logreg(&x, &y, &cfg).unwrap();
        let nb = model.n_features();
        for c in 0..NUM_CLASSES {
            for j in 0..nb {
                assert!(model.weights()[(c, j)].abs() < 1e-6);
            }
        }
        let pred = predict_logreg(&model, &x).unwrap();
        assert!(pred.labels.iter().all(|&c| c == Class::Clean));
        // Biases recover log class priors up to a shared constant.
        let b = [model.bias(0), model.bias(1), model.bias(2)];
        assert!((b[2] - b[0] - libm::log(3.0)).abs() < 1e-4);
        assert!((b[1] - b[0]).abs() < 1e-4);
    }

    #[test]
    fn errors_on_degenerate_input() {
        let (x, _) = toy();
        let y = vec![Class::Clean; 4];
        assert!(matches!(train_logreg(&x, &y, &LogRegConfig::default()), Err(Error::SingleClass)));
        let empty = SparseMatrix::zeros(0, 2);
        assert!(matches!(train_logreg(&empty, &[], &LogRegConfig::default()), Err(Error::Empty(_))));
        let wide = SparseMatrix::zeros(1, 3);
        assert!(predict_logreg(&LogRegModel::zeros(2), &wide).is_err());
    }

    fn random_problem(seed: u64, n: usize, d: usize) -> (SparseMatrix, Vec<Class>) {
        let mut rng = seeded(seed);
        let rows: Vec<SparseRow> = (0..n)
            .map(|_| {
                let mut e = Vec::new();
                for j in 0..d {
                    if rng.gen_bool(0.5) {
                        e.push((j, rng.gen_range(-2.0..2.0)));
                    }
                }
                SparseRow::from_entries(d, e).unwrap()
            })
            .collect();
        let y = (0..n).map(|i| Class::from_index(i % 3).unwrap()).collect();
        (SparseMatrix::from_rows(d, &rows).unwrap(), y)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (x, y) = random_problem(3, 12, 5);
        let mut rng = seeded(4);
        let w: Vec<f64> = (0..NUM_CLASSES * 6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut g = vec![0.0; w.len()];
        objective_and_gradient(&w, &x, &y, 0.7, &mut g);
        let mut scratch = vec![0.0; w.len()];
        let h = 1e-5;
        for k in 0..w.len() {
            let mut wp = w.clone();
            wp[k] += h;
            let fp = objective_and_gradient(&wp, &x, &y, 0.7, &mut scratch);
            wp[k] -= 2.0 * h;
            let fm = objective_and_gradient(&wp, &x, &y, 0.7, &mut scratch);
            let num = (fp - fm) / (2.0 * h);
            let rel = (g[k] - num).abs() / g[k].abs().max(num.abs()).max(1e-8);
            assert!(rel < 1e-4, "entry {k}: {} vs {num}", g[k]);
        }
    }

    #[test]
    fn converges_to_stationary_point() {
        let (x, y) = random_problem(5, 40, 6);
        let fit = train_logreg_traced(&x, &y, &LogRegConfig::default()).unwrap();
        assert!(fit.converged);
        let w = fit.model.weights().as_slice().to_vec();
        let mut g = vec![0.0; w.len()];
        objective_and_gradient(&w, &x, &y, 1.0, &mut g);
        assert!(g.iter().all(|v| v.abs() < 1e-5));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn objective_decreases_across_steps(seed in 0u64..1000, n in 3usize..30, d in 1usize..8) {
            let (x, y) = random_problem(seed, n, d);
            let fit = train_logreg_traced(&x, &y, &LogRegConfig::default()).unwrap();
            for w in fit.objective_trace.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
            let pred = predict_logreg(&fit.model, &x).unwrap();
            for i in 0..n {
                let s: f64 = pred.probs.row(i).iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn zero_columns_do_not_change_predictions(seed in 0u64..1000, extra in 1usize..5) {
            let (x, y) = random_problem(seed, 15, 4);
            let rows: Vec<SparseRow> = (0..x.n_rows())
                .map(|i| {
                    let r = x.row(i);
                    // Zero columns interleaved before every real column.
                    let e = r.iter().map(|(j, v)| (j + extra, v)).collect();
                    SparseRow::from_entries(4 + extra, e).unwrap()
                })
                .collect();
            let wide = SparseMatrix::from_rows(4 + extra, &rows).unwrap();
            let a = predict_logreg(&train_logreg(&x, &y, &LogRegConfig::default()).unwrap(), &x).unwrap();
            let b = predict_logreg(&train_logreg(&wide, &y, &LogRegConfig::default()).unwrap(), &wide).unwrap();
            prop_assert_eq!(a.labels, b.labels);
            prop_assert!(a.probs.max_abs_diff(&b.probs) < 1e-12);
        }
    }
}
