//! The community graph (authors and follower edges) and the extended graph
//! (authors, documents, follower edges and authorship edges).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Corpus, EdgeList};
use crate::error::{Error, Result};
use crate::math;
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum NodeKind {
    Author,
    Document,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Author => "author",
            NodeKind::Document => "document",
        }
    }
}

/// Undirected graph over typed nodes. Self-edges are never stored; they are
/// added by [`adjacency`] when requested.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HeteroGraph {
    nodes: Vec<(String, NodeKind)>,
    index_of: BTreeMap<(NodeKind, String), usize>,
    edges: BTreeSet<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl HeteroGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node and returns its index; re-adding returns the existing one.
    pub fn add_node(&mut self, id: &str, kind: NodeKind) -> usize {
        if let Some(&i) = self.index_of.get(&(kind, String::from(id))) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push((String::from(id), kind));
        self.index_of.insert((kind, String::from(id)), i);
        self.neighbors.push(Vec::new());
        i
    }

    /// Adds the undirected edge `{a, b}`. Returns `false` for duplicates;
    /// self-edges are rejected.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<bool> {
        let n = self.nodes.len();
        if a >= n || b >= n {
            return Err(Error::DimensionMismatch {
                context: "edge endpoint",
                expected: n,
                found: a.max(b),
            });
        }
        if a == b {
            return Err(Error::SelfPair(self.nodes[a].0.clone()));
        }
        let key = (a.min(b), a.max(b));
        if !self.edges.insert(key) {
            return Ok(false);
        }
        for (u, v) in [(a, b), (b, a)] {
            let list = &mut self.neighbors[u];
            let pos = list.binary_search(&v).unwrap_err();
            list.insert(pos, v);
        }
        Ok(true)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, i: usize) -> (&str, NodeKind) {
        let (id, k) = &self.nodes[i];
        (id.as_str(), *k)
    }

    pub fn kind(&self, i: usize) -> NodeKind {
        self.nodes[i].1
    }

    pub fn index_of(&self, id: &str, kind: NodeKind) -> Option<usize> {
        self.index_of.get(&(kind, String::from(id))).copied()
    }

    /// Sorted neighbor indices, self excluded.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn is_solitary(&self, i: usize) -> bool {
        self.neighbors[i].is_empty()
    }

    /// Edges as `(smaller, larger)` index pairs in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, (_, k))| *k == kind)
            .map(|(i, _)| i)
    }

    pub fn n_authors(&self) -> usize {
        self.nodes_of_kind(NodeKind::Author).count()
    }
}

fn add_author_nodes(graph: &mut HeteroGraph, corpus: &Corpus, edges: &EdgeList) -> Result<()> {
    for a in corpus.authors() {
        graph.add_node(a, NodeKind::Author);
    }
    for (a, b) in edges.iter() {
        let ia = corpus
            .author_index(a)
            .ok_or_else(|| Error::UnknownAuthor(String::from(a)))?;
        let ib = corpus
            .author_index(b)
            .ok_or_else(|| Error::UnknownAuthor(String::from(b)))?;
        graph.add_edge(ia, ib)?;
    }
    Ok(())
}

/// Author nodes in corpus order with one edge per follower relation.
pub fn build_community_graph(corpus: &Corpus, edges: &EdgeList) -> Result<HeteroGraph> {
    let mut g = HeteroGraph::new();
    add_author_nodes(&mut g, corpus, edges)?;
    Ok(g)
}

/// Community graph plus one document node per document (after all authors,
/// in corpus order), each linked to its author.
pub fn build_extended_graph(corpus: &Corpus, edges: &EdgeList) -> Result<HeteroGraph> {
    let mut g = HeteroGraph::new();
    add_author_nodes(&mut g, corpus, edges)?;
    for (d, doc) in corpus.documents().iter().enumerate() {
        let node = g.add_node(&doc.doc_id, NodeKind::Document);
        g.add_edge(node, corpus.doc_author(d))?;
    }
    Ok(g)
}

/// Symmetric 0/1 adjacency, optionally with unit diagonal.
pub fn adjacency(graph: &HeteroGraph, with_self_loops: bool) -> SparseMatrix {
    let n = graph.n_nodes();
    let mut triplets = Vec::with_capacity(2 * graph.n_edges() + n);
    for i in 0..n {
        if with_self_loops {
            triplets.push((i, i, 1.0));
        }
        for &j in graph.neighbors(i) {
            triplets.push((i, j, 1.0));
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets).expect("graph indices are in range")
}

/// `D^-1/2 A D^-1/2` for a graph adjacency with self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    matrix: SparseMatrix,
}

impl NormalizedAdjacency {
    pub fn from_graph(graph: &HeteroGraph) -> Self {
        normalize_adjacency(&adjacency(graph, true)).expect("self-loops give positive degrees")
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n_rows()
    }
}

pub fn normalize_adjacency(a: &SparseMatrix) -> Result<NormalizedAdjacency> {
    if a.n_rows() != a.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "adjacency must be square",
            expected: a.n_rows(),
            found: a.n_cols(),
        });
    }
    let degrees = a.row_sums();
    if let Some(i) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegree(i));
    }
    let mut rows = Vec::with_capacity(a.n_rows());
    for i in 0..a.n_rows() {
        let mut row = a.row(i);
        for (j, v) in row.indices.iter().zip(row.values.iter_mut()) {
            // A_ij / sqrt(D_ii D_jj): the product is symmetric in (i, j) so
            // the result is exactly symmetric.
            *v /= math::sqrt(degrees[i] * degrees[*j]);
        }
        rows.push(row);
    }
    Ok(NormalizedAdjacency {
        matrix: SparseMatrix::from_rows(a.n_cols(), &rows)?,
    })
}
