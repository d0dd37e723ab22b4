use crate::dense::DenseMatrix;
use crate::math;

use super::backward::Gradients;
use super::model::GcnModel;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates for both weight matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub m1: DenseMatrix,
    pub v1: DenseMatrix,
    pub m2: DenseMatrix,
    pub v2: DenseMatrix,
    pub t: u64,
}

impl AdamState {
    pub fn new(model: &GcnModel, config: AdamConfig) -> Self {
        let (r1, c1) = model.w1.shape();
        let (r2, c2) = model.w2.shape();
        Self {
            config,
            m1: DenseMatrix::zeros(r1, c1),
            v1: DenseMatrix::zeros(r1, c1),
            m2: DenseMatrix::zeros(r2, c2),
            v2: DenseMatrix::zeros(r2, c2),
            t: 0,
        }
    }
}

fn update(params: &mut [f64], grads: &[f64], m: &mut [f64], v: &mut [f64], lr: f64, c: &AdamConfig, t: u64) {
    let bc1 = 1.0 - math::powi(c.beta1, t as i32);
    let bc2 = 1.0 - math::powi(c.beta2, t as i32);
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        params[i] -= lr * m_hat / (math::sqrt(v_hat) + c.eps);
    }
}

/// One bias-corrected Adam update of both weight matrices.
pub fn adam_step(model: &mut GcnModel, grads: &Gradients, state: &mut AdamState, lr: f64) {
    assert_eq!(model.w1.shape(), grads.w1.shape(), "w1 gradient shape");
    assert_eq!(model.w2.shape(), grads.w2.shape(), "w2 gradient shape");
    state.t += 1;
    let c = state.config;
    update(
        model.w1.as_mut_slice(),
        grads.w1.as_slice(),
        state.m1.as_mut_slice(),
        state.v1.as_mut_slice(),
        lr,
        &c,
        state.t,
    );
    update(
        model.w2.as_mut_slice(),
        grads.w2.as_slice(),
        state.m2.as_mut_slice(),
        state.v2.as_mut_slice(),
        lr,
        &c,
        state.t,
    );
}
