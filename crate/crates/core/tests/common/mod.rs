//! Shared fixtures for GCN tests: random extended-graph instances, a dense
//! reference forward pass and central finite differences.
#![allow(dead_code, unused_imports)]

pub use commgraph_core::corpus::{Corpus, DocumentRecord, EdgeList};
pub use commgraph_core::features::{build_feature_matrix, build_word_vocab, TokenOptions};
pub use commgraph_core::gcn::{
    backward, extract_embeddings, forward, masked_cross_entropy, predict_gcn, DropoutMasks,
    GcnModel, Gradients, LabelMask, MaskKind,
};
pub use commgraph_core::graph::{adjacency, build_extended_graph, NormalizedAdjacency};
pub use commgraph_core::rng::seeded;
pub use commgraph_core::{DenseMatrix, HeteroGraph, NodeKind, SparseMatrix, PROFILE_DIM};
pub use rand::Rng;

pub struct Instance {
    pub graph: HeteroGraph,
    pub adj: NormalizedAdjacency,
    pub features: SparseMatrix,
    pub mask: LabelMask,
}

/// Random extended graph with at most `max_nodes` nodes and a vocabulary of
/// at most `max_vocab` words; every document node is labeled and roughly
/// half of them are in the train mask.
pub fn random_instance(seed: u64, max_nodes: usize, max_vocab: usize) -> Instance {
    let mut rng = seeded(seed);
    let n_authors = rng.gen_range(1..=4usize);
    let n_docs = rng.gen_range(2..=max_nodes - n_authors);
    let vocab = rng.gen_range(2..=max_vocab);
    let docs: Vec<DocumentRecord> = (0..n_docs)
        .map(|d| {
            let len = rng.gen_range(1..6);
            let text: Vec<String> = (0..len).map(|_| format!("w{}", rng.gen_range(0..vocab))).collect();
            DocumentRecord::new(format!("d{d}"), format!("a{}", rng.gen_range(0..n_authors)), text.join(" "), None)
        })
        .collect();
    let mut corpus = Corpus::new(docs).unwrap();
    for a in 0..n_authors {
        corpus.register_author(&format!("a{a}"));
    }
    let mut edges = EdgeList::new();
    for a in 0..n_authors {
        for b in a + 1..n_authors {
            if rng.gen_bool(0.5) {
                edges.insert(&format!("a{a}"), &format!("a{b}")).unwrap();
            }
        }
    }
    let graph = build_extended_graph(&corpus, &edges).unwrap();
    let v = build_word_vocab(&corpus, TokenOptions::default());
    let features = build_feature_matrix(&graph, &corpus, &v, TokenOptions::default())
        .unwrap()
        .matrix;
    let n = graph.n_nodes();
    let mut labels = vec![None; n];
    let mut train = vec![false; n];
    for i in graph.nodes_of_kind(NodeKind::Document) {
        labels[i] = Some(rng.gen_range(0..3));
        train[i] = rng.gen_bool(0.6);
    }
    let first_doc = graph.nodes_of_kind(NodeKind::Document).next().unwrap();
    train[first_doc] = true;
    let mask = LabelMask::new(labels, train, vec![false; n]).unwrap();
    mask.check_node_kinds(&graph).unwrap();
    Instance {
        adj: NormalizedAdjacency::from_graph(&graph),
        graph,
        features,
        mask,
    }
}

pub fn random_model(n_features: usize, seed: u64) -> GcnModel {
    GcnModel::glorot(n_features, PROFILE_DIM, 3, &mut seeded(seed)).unwrap()
}

pub fn loss(inst: &Instance, model: &GcnModel) -> f64 {
    let pass = forward(&inst.adj, &inst.features, model, None).unwrap();
    masked_cross_entropy(&pass.log_probs, &inst.mask, MaskKind::Train).unwrap()
}

/// Dense re-implementation: explicit D^-1/2 A D^-1/2, dense products, and
/// softmax by exponentiation.
pub fn dense_reference(graph: &HeteroGraph, features: &SparseMatrix, model: &GcnModel) -> (DenseMatrix, DenseMatrix) {
    let n = graph.n_nodes();
    let mut a = DenseMatrix::identity(n);
    for (i, j) in graph.edges() {
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
    }
    let deg: Vec<f64> = (0..n).map(|i| a.row(i).iter().sum()).collect();
    let mut norm = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            norm[(i, j)] = a[(i, j)] / (deg[i].sqrt() * deg[j].sqrt());
        }
    }
    let f = features.to_dense();
    let h = norm.matmul(&f.matmul(&model.w1).unwrap()).unwrap();
    let mut r = h.clone();
    r.map_inplace(|v| v.max(0.0));
    let z = norm.matmul(&r.matmul(&model.w2).unwrap()).unwrap();
    let mut o = z.clone();
    for i in 0..n {
        let e: Vec<f64> = z.row(i).iter().map(|v| v.exp()).collect();
        let s: f64 = e.iter().sum();
        for (k, v) in e.iter().enumerate() {
            o[(i, k)] = v / s;
        }
    }
    (h, o)
}

/// True when no hidden pre-activation lies within one step of the ReLU kink.
/// A step of `h` in a single W1 entry moves each pre-activation by at most
/// `h * max(ÃF)`, so under this condition every central difference stays on
/// one linear piece.
pub fn kink_free(inst: &Instance, model: &GcnModel, h: f64) -> bool {
    let af = inst.adj.matrix().to_dense().matmul(&inst.features.to_dense()).unwrap();
    let margin = h * af.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pass = forward(&inst.adj, &inst.features, model, None).unwrap();
    pass.hidden_pre.as_slice().iter().all(|v| v.abs() > margin)
}

pub fn finite_difference(inst: &Instance, model: &GcnModel, h: f64) -> Gradients {
    let mut g1 = DenseMatrix::zeros(model.w1.rows(), model.w1.cols());
    let mut m = model.clone();
    for k in 0..g1.as_slice().len() {
        let orig = m.w1.as_slice()[k];
        m.w1.as_mut_slice()[k] = orig + h;
        let up = loss(inst, &m);
        m.w1.as_mut_slice()[k] = orig - h;
        let down = loss(inst, &m);
        m.w1.as_mut_slice()[k] = orig;
        g1.as_mut_slice()[k] = (up - down) / (2.0 * h);
    }
    let mut g2 = DenseMatrix::zeros(model.w2.rows(), model.w2.cols());
    for k in 0..g2.as_slice().len() {
        let orig = m.w2.as_slice()[k];
        m.w2.as_mut_slice()[k] = orig + h;
        let up = loss(inst, &m);
        m.w2.as_mut_slice()[k] = orig - h;
        let down = loss(inst, &m);
        m.w2.as_mut_slice()[k] = orig;
        g2.as_mut_slice()[k] = (up - down) / (2.0 * h);
    }
    Gradients { w1: g1, w2: g2 }
}

/// Relative error with a floor of 1e-6 on the denominator: central
/// differences of an O(1) loss at h = 1e-5 carry about 1e-11 of roundoff.
pub fn max_rel_err(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-6))
        .fold(0.0, f64::max)
}
