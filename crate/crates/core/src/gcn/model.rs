use rand::Rng as _;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::math;
use crate::rng::Rng;

/// Glorot/Xavier uniform bound `sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_bound(rows: usize, cols: usize) -> f64 {
    math::sqrt(6.0 / (rows + cols) as f64)
}

/// I.i.d. uniform entries on `[-b, b]`, `b = glorot_bound(rows, cols)`.
pub fn glorot_init(rows: usize, cols: usize, rng: &mut Rng) -> DenseMatrix {
    let b = glorot_bound(rows, cols);
    let data = (0..rows * cols).map(|_| rng.gen_range(-b..=b)).collect();
    DenseMatrix::from_vec(rows, cols, data).expect("buffer sized to shape")
}

/// Weights of the two graph convolutions: `w1` is `features × hidden`,
/// `w2` is `hidden × classes`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GcnModel {
    pub w1: DenseMatrix,
    pub w2: DenseMatrix,
}

impl GcnModel {
    pub fn glorot(n_features: usize, hidden: usize, classes: usize, rng: &mut Rng) -> Result<Self> {
        if n_features == 0 || hidden == 0 || classes == 0 {
            return Err(Error::Empty("model dimensions"));
        }
        let w1 = glorot_init(n_features, hidden, rng);
        let w2 = glorot_init(hidden, classes, rng);
        Ok(Self { w1, w2 })
    }

    pub fn from_weights(w1: DenseMatrix, w2: DenseMatrix) -> Result<Self> {
        if w1.cols() != w2.rows() {
            return Err(Error::DimensionMismatch {
                context: "hidden width of w1 vs w2",
                expected: w1.cols(),
                found: w2.rows(),
            });
        }
        if !w1.is_finite() || !w2.is_finite() {
            return Err(Error::NonFinite("model weights"));
        }
        Ok(Self { w1, w2 })
    }

    pub fn n_features(&self) -> usize {
        self.w1.rows()
    }

    pub fn hidden(&self) -> usize {
        self.w1.cols()
    }

    pub fn classes(&self) -> usize {
        self.w2.cols()
    }
}
