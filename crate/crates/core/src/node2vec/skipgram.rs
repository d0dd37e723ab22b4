use alloc::vec;
use alloc::vec::Vec;
use rand::Rng as _;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::math;
use crate::rng::Rng;
use crate::PROFILE_DIM;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SkipGramConfig {
    pub dim: usize,
    /// Context radius on each side of the center.
    pub window: usize,
    pub negatives: usize,
    /// Full passes over the walk corpus.
    pub iterations: usize,
    /// Learning rate at the start; decays linearly to `1e-4 ×` this.
    pub initial_lr: f64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        Self {
            dim: PROFILE_DIM,
            window: 10,
            negatives: 5,
            iterations: 25,
            initial_lr: 0.025,
        }
    }
}

impl SkipGramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.window == 0 || self.negatives == 0 {
            return Err(Error::InvalidConfig(
                "skipgram.dim, window and negatives must be positive".into(),
            ));
        }
        if !(self.initial_lr > 0.0) {
            return Err(Error::InvalidConfig("skipgram.initial_lr must be positive".into()));
        }
        Ok(())
    }
}

/// Input (center) and output (context) vectors plus the negative-sampling
/// table.
#[derive(Debug, Clone)]
pub struct SkipGram {
    pub input: DenseMatrix,
    pub output: DenseMatrix,
    /// Cumulative unigram^0.75 distribution over node ids.
    noise_cdf: Vec<f64>,
    center_buf: Vec<f64>,
    grad_buf: Vec<f64>,
}

impl SkipGram {
    /// Input vectors uniform on `[-0.5/dim, 0.5/dim]`, output vectors zero.
    pub fn new(n_nodes: usize, dim: usize, rng: &mut Rng) -> Self {
        let half = 0.5 / dim as f64;
        let data = (0..n_nodes * dim).map(|_| rng.gen_range(-half..half)).collect();
        Self {
            input: DenseMatrix::from_vec(n_nodes, dim, data).expect("sized"),
            output: DenseMatrix::zeros(n_nodes, dim),
            noise_cdf: Vec::new(),
            center_buf: Vec::with_capacity(dim),
            grad_buf: Vec::with_capacity(dim),
        }
    }

    /// Builds the noise distribution from node frequencies in `walks`.
    pub fn set_noise_from_walks(&mut self, walks: &[Vec<usize>]) {
        let mut counts = vec![0usize; self.input.rows()];
        for w in walks {
            for &v in w {
                counts[v] += 1;
            }
        }
        let mut acc = 0.0;
        self.noise_cdf = counts
            .iter()
            .map(|&c| {
                acc += math::powf(c as f64, 0.75);
                acc
            })
            .collect();
        if acc > 0.0 {
            for v in &mut self.noise_cdf {
                *v /= acc;
            }
        }
    }

    pub fn sample_negative(&self, rng: &mut Rng) -> usize {
        let u: f64 = rng.gen();
        match self.noise_cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => (i + 1).min(self.noise_cdf.len() - 1),
            Err(i) => i.min(self.noise_cdf.len() - 1),
        }
    }

    /// `log σ(u_ctx · v_c) + Σ_neg log σ(-u_neg · v_c)`.
    pub fn objective(&self, center: usize, context: usize, negatives: &[usize]) -> f64 {
        let v = self.input.row(center);
        let mut obj = math::log_sigmoid(math::dot(self.output.row(context), v));
        for &n in negatives {
            obj += math::log_sigmoid(-math::dot(self.output.row(n), v));
        }
        obj
    }

    /// One stochastic ascent step on [`Self::objective`].
    pub fn step(&mut self, center: usize, context: usize, negatives: &[usize], lr: f64) {
        let dim = self.input.cols();
        self.center_buf.clear();
        self.center_buf.extend_from_slice(self.input.row(center));
        self.grad_buf.clear();
        self.grad_buf.resize(dim, 0.0);
        let targets = core::iter::once((context, 1.0)).chain(negatives.iter().map(|&n| (n, 0.0)));
        for (t, label) in targets {
            let out = self.output.row_mut(t);
            let g = lr * (label - math::sigmoid(math::dot(out, &self.center_buf)));
            for ((e, o), &x) in self.grad_buf.iter_mut().zip(out.iter_mut()).zip(&self.center_buf) {
                *e += g * *o;
                *o += g * x;
            }
        }
        for (x, e) in self.input.row_mut(center).iter_mut().zip(&self.grad_buf) {
            *x += e;
        }
    }
}

/// Skip-gram with negative sampling over the walk corpus; returns the input
/// vectors (one row per node id `< n_nodes`).
pub fn train_skipgram(
    walks: &[Vec<usize>],
    n_nodes: usize,
    config: &SkipGramConfig,
    rng: &mut Rng,
) -> Result<DenseMatrix> {
    config.validate()?;
    if walks.iter().all(|w| w.len() < 2) {
        return Err(Error::Empty("walk corpus"));
    }
    if let Some(&bad) = walks.iter().flatten().find(|&&v| v >= n_nodes) {
        return Err(Error::DimensionMismatch {
            context: "walk node id",
            expected: n_nodes,
            found: bad,
        });
    }
    let mut model = SkipGram::new(n_nodes, config.dim, rng);
    model.set_noise_from_walks(walks);

    let pairs_per_pass: usize = walks
        .iter()
        .map(|w| {
            (0..w.len())
                .map(|i| i.min(config.window) + (w.len() - 1 - i).min(config.window))
                .sum::<usize>()
        })
        .sum();
    let total = (pairs_per_pass * config.iterations).max(1) as f64;
    let min_lr = config.initial_lr * 1e-4;
    let mut done = 0usize;
    let mut negs = Vec::with_capacity(config.negatives);

    for _ in 0..config.iterations {
        for walk in walks {
            for (i, &center) in walk.iter().enumerate() {
                let lo = i.saturating_sub(config.window);
                let hi = (i + config.window).min(walk.len() - 1);
                for (j, &context) in walk.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i {
                        continue;
                    }
                    let lr = (config.initial_lr * (1.0 - done as f64 / total)).max(min_lr);
                    negs.clear();
                    while negs.len() < config.negatives {
                        let n = model.sample_negative(rng);
                        if n != context {
                            negs.push(n);
                        }
                    }
                    model.step(center, context, &negs, lr);
                    done += 1;
                }
            }
        }
    }
    Ok(model.input)
}
