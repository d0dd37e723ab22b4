//! Fixed-width author profile vectors in corpus author order.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::{HeteroGraph, NodeKind};

#[derive(Debug, Clone, PartialEq)]
pub struct AuthorProfiles {
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
    matrix: DenseMatrix,
}

impl AuthorProfiles {
    pub fn new(ids: Vec<String>, matrix: DenseMatrix) -> Result<Self> {
        if ids.len() != matrix.rows() {
            return Err(Error::DimensionMismatch {
                context: "profile ids vs rows",
                expected: ids.len(),
                found: matrix.rows(),
            });
        }
        let index = ids.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self { ids, index, matrix })
    }

    /// Author rows of a node-indexed matrix, in graph order.
    pub fn from_node_matrix(graph: &HeteroGraph, nodes: &DenseMatrix) -> Result<Self> {
        let authors: Vec<usize> = graph.nodes_of_kind(NodeKind::Author).collect();
        let ids = authors.iter().map(|&i| String::from(graph.node(i).0)).collect();
        Self::new(ids, nodes.select_rows(&authors))
    }

    /// All-zero profiles of width `dim` for the given authors.
    pub fn zeros(ids: Vec<String>, dim: usize) -> Self {
        let m = DenseMatrix::zeros(ids.len(), dim);
        Self::new(ids, m).expect("shape matches ids")
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn get(&self, author: &str) -> Result<&[f64]> {
        self.index
            .get(author)
            .map(|&i| self.matrix.row(i))
            .ok_or_else(|| Error::NoSuchAuthor(String::from(author)))
    }
}
