//! node2vec: second-order biased random walks fed to skip-gram with
//! negative sampling. Nodes without edges get the exact zero vector.

mod skipgram;
mod walk;

pub use skipgram::{train_skipgram, SkipGram, SkipGramConfig};
pub use walk::{generate_walks, sample_next, transition_distribution, WalkConfig};

use alloc::string::String;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::Result;
use crate::graph::{HeteroGraph, NodeKind};
use crate::profiles::AuthorProfiles;
use crate::rng::Rng;

/// Trained node vectors with a per-node solitary flag.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEmbeddings {
    pub vectors: DenseMatrix,
    pub solitary: Vec<bool>,
}

impl NodeEmbeddings {
    /// Takes trained vectors and zeroes every solitary node.
    pub fn from_trained(graph: &HeteroGraph, mut vectors: DenseMatrix) -> Self {
        let solitary: Vec<bool> = (0..graph.n_nodes()).map(|i| graph.is_solitary(i)).collect();
        for (i, &s) in solitary.iter().enumerate() {
            if s {
                vectors.row_mut(i).fill(0.0);
            }
        }
        Self { vectors, solitary }
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }
}

/// Walks plus skip-gram over `graph`. A graph without edges yields all-zero
/// embeddings.
pub fn node2vec(
    graph: &HeteroGraph,
    walks: &WalkConfig,
    skipgram: &SkipGramConfig,
    rng: &mut Rng,
) -> Result<NodeEmbeddings> {
    walks.validate()?;
    skipgram.validate()?;
    let corpus = generate_walks(graph, walks)?;
    let vectors = if corpus.is_empty() {
        DenseMatrix::zeros(graph.n_nodes(), skipgram.dim)
    } else {
        train_skipgram(&corpus, graph.n_nodes(), skipgram, rng)?
    };
    Ok(NodeEmbeddings::from_trained(graph, vectors))
}

/// Author rows of the embedding; document vectors (extended graph) are
/// dropped.
pub fn author_profiles(embeddings: &NodeEmbeddings, graph: &HeteroGraph) -> AuthorProfiles {
    let authors: Vec<usize> = graph.nodes_of_kind(NodeKind::Author).collect();
    let ids = authors.iter().map(|&i| String::from(graph.node(i).0)).collect();
    AuthorProfiles::new(ids, embeddings.vectors.select_rows(&authors)).expect("row count matches")
}
