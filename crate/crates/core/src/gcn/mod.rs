//! Two-layer graph convolutional network over the extended graph.
//!
//! `O = softmax(Ã · ReLU(Ã F W1) · W2)`, trained on a masked cross-entropy
//! with analytically derived gradients and Adam. The first-layer
//! pre-activation `E = Ã F W1` doubles as the author profile matrix.

mod adam;
mod backward;
mod forward;
mod model;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use backward::{backward, Gradients};
pub use forward::{
    extract_embeddings, forward, masked_cross_entropy, predict_gcn, DropoutMasks, ForwardPass,
    LabelMask, MaskKind,
};
pub use model::{glorot_bound, glorot_init, GcnModel};
pub use train::{train, EarlyStopping, EpochRecord, StopCheck, TrainConfig, TrainResult};
