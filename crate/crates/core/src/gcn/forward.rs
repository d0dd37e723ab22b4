use alloc::vec;
use alloc::vec::Vec;
use rand::Rng as _;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, NodeKind, NormalizedAdjacency};
use crate::math;
use crate::rng::Rng;
use crate::sparse::SparseMatrix;
use crate::NUM_CLASSES;

use super::model::GcnModel;

/// Per-node labels plus disjoint train and validation selections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMask {
    labels: Vec<Option<usize>>,
    train: Vec<bool>,
    val: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskKind {
    Train,
    Val,
}

impl LabelMask {
    pub fn new(labels: Vec<Option<usize>>, train: Vec<bool>, val: Vec<bool>) -> Result<Self> {
        let n = labels.len();
        if train.len() != n || val.len() != n {
            return Err(Error::DimensionMismatch {
                context: "label mask length",
                expected: n,
                found: if train.len() != n { train.len() } else { val.len() },
            });
        }
        for i in 0..n {
            if train[i] && val[i] {
                return Err(Error::InvalidMask(alloc::format!(
                    "node {i} is in both train and validation masks"
                )));
            }
            if (train[i] || val[i]) && labels[i].is_none() {
                return Err(Error::InvalidMask(alloc::format!("masked node {i} has no label")));
            }
            if labels[i].is_some_and(|c| c >= NUM_CLASSES) {
                return Err(Error::InvalidMask(alloc::format!("node {i} label out of range")));
            }
        }
        Ok(Self { labels, train, val })
    }

    /// Builds a mask whose selected nodes are given as index lists.
    pub fn from_indices(
        labels: Vec<Option<usize>>,
        train: &[usize],
        val: &[usize],
    ) -> Result<Self> {
        let n = labels.len();
        let mut t = vec![false; n];
        let mut v = vec![false; n];
        for &i in train {
            t[i] = true;
        }
        for &i in val {
            v[i] = true;
        }
        Self::new(labels, t, v)
    }

    /// Only document nodes may carry supervision.
    pub fn check_node_kinds(&self, graph: &HeteroGraph) -> Result<()> {
        if graph.n_nodes() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                context: "label mask vs graph",
                expected: graph.n_nodes(),
                found: self.labels.len(),
            });
        }
        for i in 0..self.labels.len() {
            if (self.train[i] || self.val[i]) && graph.kind(i) == NodeKind::Author {
                return Err(Error::InvalidMask(alloc::format!("author node {i} is masked")));
            }
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn selected(&self, which: MaskKind) -> &[bool] {
        match which {
            MaskKind::Train => &self.train,
            MaskKind::Val => &self.val,
        }
    }

    /// `(node, gold class)` for every node in the chosen mask.
    pub fn targets(&self, which: MaskKind) -> Vec<(usize, usize)> {
        self.selected(which)
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| (i, self.labels[i].expect("validated")))
            .collect()
    }
}

/// Dropout keep-masks for one training step: one flag per stored feature
/// entry and one per hidden unit.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMasks {
    pub rate: f64,
    pub input: Vec<bool>,
    pub hidden: Vec<bool>,
}

impl DropoutMasks {
    pub fn sample(features: &SparseMatrix, hidden_len: usize, rate: f64, rng: &mut Rng) -> Self {
        let keep = 1.0 - rate;
        let input = (0..features.nnz()).map(|_| rng.gen::<f64>() < keep).collect();
        let hidden = (0..hidden_len).map(|_| rng.gen::<f64>() < keep).collect();
        Self {
            rate,
            input,
            hidden,
        }
    }

    fn scale(&self) -> f64 {
        1.0 / (1.0 - self.rate)
    }
}

/// Intermediates of one forward pass, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Input features after dropout (equal to `F` in evaluation mode).
    pub input: SparseMatrix,
    /// `Ã · input · W1`.
    pub hidden_pre: DenseMatrix,
    /// `ReLU(hidden_pre)` after hidden dropout.
    pub hidden: DenseMatrix,
    /// Scale applied to kept hidden units (1 without dropout).
    pub hidden_scale: f64,
    pub logits: DenseMatrix,
    pub probs: DenseMatrix,
    pub log_probs: DenseMatrix,
}

fn check_dims(adj: &NormalizedAdjacency, features: &SparseMatrix, model: &GcnModel) -> Result<()> {
    if adj.n() != features.n_rows() {
        return Err(Error::DimensionMismatch {
            context: "adjacency vs feature rows",
            expected: adj.n(),
            found: features.n_rows(),
        });
    }
    if features.n_cols() != model.n_features() {
        return Err(Error::DimensionMismatch {
            context: "feature width vs w1 rows",
            expected: model.n_features(),
            found: features.n_cols(),
        });
    }
    Ok(())
}

fn first_layer_with(adj: &NormalizedAdjacency, input: &SparseMatrix, w1: &DenseMatrix) -> Result<DenseMatrix> {
    let xw = input.spmm(w1)?;
    let h = adj.matrix().spmm(&xw)?;
    if !h.is_finite() {
        return Err(Error::NonFinite("first graph convolution"));
    }
    Ok(h)
}

/// Runs the network. With `dropout = None` this is evaluation mode and a
/// pure function of its inputs. With masks, input entries and post-ReLU
/// hidden units are dropped with inverted scaling; `hidden_pre` is then the
/// pre-activation of the dropped input and is never itself dropped.
pub fn forward(
    adj: &NormalizedAdjacency,
    features: &SparseMatrix,
    model: &GcnModel,
    dropout: Option<&DropoutMasks>,
) -> Result<ForwardPass> {
    check_dims(adj, features, model)?;
    let input = match dropout {
        Some(d) => features.mask_entries(&d.input, d.scale()),
        None => features.clone(),
    };
    let hidden_pre = first_layer_with(adj, &input, &model.w1)?;

    let mut hidden = hidden_pre.clone();
    hidden.map_inplace(|v| v.max(0.0));
    let hidden_scale = match dropout {
        Some(d) => {
            if d.hidden.len() != hidden.as_slice().len() {
                return Err(Error::DimensionMismatch {
                    context: "hidden dropout mask",
                    expected: hidden.as_slice().len(),
                    found: d.hidden.len(),
                });
            }
            let s = d.scale();
            for (v, &keep) in hidden.as_mut_slice().iter_mut().zip(&d.hidden) {
                *v = if keep { *v * s } else { 0.0 };
            }
            s
        }
        None => 1.0,
    };

    let logits = adj.matrix().spmm(&hidden.matmul(&model.w2)?)?;
    if !logits.is_finite() {
        return Err(Error::NonFinite("second graph convolution"));
    }
    let (n, c) = logits.shape();
    let mut log_probs = DenseMatrix::zeros(n, c);
    for i in 0..n {
        math::log_softmax_into(logits.row(i), log_probs.row_mut(i));
    }
    let mut probs = log_probs.clone();
    probs.map_inplace(math::exp);
    Ok(ForwardPass {
        input,
        hidden_pre,
        hidden,
        hidden_scale,
        logits,
        probs,
        log_probs,
    })
}

/// Mean of `-log O[node, gold]` over the chosen mask, read from the
/// log-softmax so that saturated logits stay finite. Nodes outside the mask
/// contribute nothing.
pub fn masked_cross_entropy(log_probs: &DenseMatrix, mask: &LabelMask, which: MaskKind) -> Result<f64> {
    if log_probs.rows() != mask.n_nodes() {
        return Err(Error::DimensionMismatch {
            context: "loss rows vs mask",
            expected: mask.n_nodes(),
            found: log_probs.rows(),
        });
    }
    let targets = mask.targets(which);
    if targets.is_empty() {
        return Err(Error::EmptyMask(match which {
            MaskKind::Train => "train",
            MaskKind::Val => "validation",
        }));
    }
    let total: f64 = targets.iter().map(|&(i, y)| -log_probs[(i, y)]).sum();
    Ok(total / targets.len() as f64)
}

/// `E = Ã F W1`: no activation, no dropout. Shares the evaluation-mode code
/// path of [`forward`], so it is bitwise equal to its `hidden_pre`.
pub fn extract_embeddings(
    adj: &NormalizedAdjacency,
    features: &SparseMatrix,
    model: &GcnModel,
) -> Result<DenseMatrix> {
    check_dims(adj, features, model)?;
    first_layer_with(adj, features, &model.w1)
}

/// Argmax class per requested node, ties to the lowest class index.
pub fn predict_gcn(probs: &DenseMatrix, nodes: &[usize]) -> Vec<usize> {
    nodes.iter().map(|&i| math::argmax(probs.row(i))).collect()
}
