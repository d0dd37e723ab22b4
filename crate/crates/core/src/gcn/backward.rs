use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::NormalizedAdjacency;

use super::forward::{ForwardPass, LabelMask, MaskKind};
use super::model::GcnModel;

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: DenseMatrix,
    pub w2: DenseMatrix,
}

impl Gradients {
    pub fn max_abs(&self) -> f64 {
        self.w1
            .as_slice()
            .iter()
            .chain(self.w2.as_slice())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Gradients of the train-mask cross-entropy plus
/// `weight_decay / 2 · (‖W1‖² + ‖W2‖²)` with respect to both weight
/// matrices, given the intermediates of the paired forward pass.
///
/// With `S = (O - Y) ⊙ mask / |mask|` and `G = Ãᵀ S`:
///
/// ```text
/// dW2 = Hdᵀ G
/// dH  = (G W2ᵀ) ⊙ [Hd > 0] · scale
/// dW1 = Fdᵀ (Ãᵀ dH)
/// ```
///
/// where `Fd`/`Hd` are the dropped input and hidden activations and `scale`
/// is the inverted-dropout factor (`Hd > 0` exactly where a unit is both
/// active and kept).
pub fn backward(
    adj: &NormalizedAdjacency,
    pass: &ForwardPass,
    model: &GcnModel,
    mask: &LabelMask,
    weight_decay: f64,
) -> Result<Gradients> {
    if pass.probs.rows() != mask.n_nodes() {
        return Err(Error::DimensionMismatch {
            context: "backward mask length",
            expected: pass.probs.rows(),
            found: mask.n_nodes(),
        });
    }
    if pass.probs.cols() != model.classes() || pass.hidden.cols() != model.hidden() {
        return Err(Error::DimensionMismatch {
            context: "forward pass vs model",
            expected: model.classes(),
            found: pass.probs.cols(),
        });
    }
    let targets = mask.targets(MaskKind::Train);
    if targets.is_empty() {
        return Err(Error::EmptyMask("train"));
    }
    let inv = 1.0 / targets.len() as f64;

    let mut s = DenseMatrix::zeros(pass.probs.rows(), pass.probs.cols());
    for &(i, y) in &targets {
        let row = s.row_mut(i);
        for (k, o) in pass.probs.row(i).iter().enumerate() {
            row[k] = (o - if k == y { 1.0 } else { 0.0 }) * inv;
        }
    }
    let g = adj.matrix().t_spmm(&s)?;
    let mut dw2 = pass.hidden.t_matmul(&g)?;

    let mut dh = g.matmul_t(&model.w2)?;
    for (d, &h) in dh.as_mut_slice().iter_mut().zip(pass.hidden.as_slice()) {
        *d = if h > 0.0 { *d * pass.hidden_scale } else { 0.0 };
    }
    let dxw = adj.matrix().t_spmm(&dh)?;
    let mut dw1 = pass.input.t_spmm(&dxw)?;

    if weight_decay > 0.0 {
        dw1.axpy(weight_decay, &model.w1);
        dw2.axpy(weight_decay, &model.w2);
    }
    if !dw1.is_finite() || !dw2.is_finite() {
        return Err(Error::NonFinite("gradients"));
    }
    Ok(Gradients { w1: dw1, w2: dw2 })
}
