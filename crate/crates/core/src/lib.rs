//! Numeric core for community-aware author profiling.
//!
//! Everything in this crate is pure computation over in-memory data and
//! builds under `#![no_std]` with `alloc`. File formats, configuration and
//! the command-line driver live in the `commgraph` crate.
//!
//! The pieces, bottom-up:
//!
//! - [`corpus`] and [`synth`]: labeled documents with author attribution,
//!   follower edge lists, validation and a planted-community generator.
//! - [`sparse`], [`dense`] and [`graph`]: CSR matrices, the community and
//!   extended author/document graphs, and `D^-1/2 A D^-1/2` normalization.
//! - [`features`]: binary bag-of-words node features and character n-grams.
//! - [`gcn`]: the two-layer graph convolutional network with hand-derived
//!   gradients, Adam, dropout and early stopping.
//! - [`node2vec`]: second-order biased walks and skip-gram with negative
//!   sampling.
//! - [`logreg`] and [`methods`]: multinomial logistic regression and the
//!   five classification methods.
//! - [`eval`]: stratified splits, P/R/F1, paired t-tests and the repeated
//!   experiment protocol.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod dense;
pub mod error;
pub mod eval;
pub mod features;
pub mod gcn;
pub mod graph;
pub mod logreg;
pub mod math;
pub mod methods;
pub mod node2vec;
pub mod profiles;
pub mod rng;
pub mod sparse;
pub mod synth;

pub use corpus::{Class, Corpus, DocumentRecord, EdgeList, ValidationReport};
pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use graph::{HeteroGraph, NodeKind, NormalizedAdjacency};
pub use sparse::{SparseMatrix, SparseRow};

/// Number of target classes.
pub const NUM_CLASSES: usize = 3;

/// Width of every author profile, GCN hidden layer and node2vec embedding.
pub const PROFILE_DIM: usize = 200;
