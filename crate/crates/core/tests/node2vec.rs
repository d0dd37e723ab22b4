use commgraph_core::corpus::{Corpus, DocumentRecord, EdgeList};
use commgraph_core::graph::{build_community_graph, build_extended_graph};
use commgraph_core::math::cosine;
use commgraph_core::node2vec::{
    author_profiles, generate_walks, node2vec, sample_next, SkipGramConfig, WalkConfig,
};
use commgraph_core::rng::seeded;
use commgraph_core::synth::{generate_synthetic_with_truth, SynthConfig};
use commgraph_core::{HeteroGraph, NodeKind, PROFILE_DIM};

fn graph(n: usize, edges: &[(usize, usize)]) -> HeteroGraph {
    let mut g = HeteroGraph::new();
    for i in 0..n {
        g.add_node(&i.to_string(), NodeKind::Author);
    }
    for &(a, b) in edges {
        g.add_edge(a, b).unwrap();
    }
    g
}

fn quick_skipgram() -> SkipGramConfig {
    SkipGramConfig {
        window: 5,
        iterations: 3,
        ..SkipGramConfig::default()
    }
}

fn quick_walks(seed: u64) -> WalkConfig {
    WalkConfig {
        walks_per_node: 10,
        walk_length: 30,
        seed,
        ..WalkConfig::default()
    }
}

#[test]
fn triangle_next_hops_are_uniform() {
    let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
    let cfg = WalkConfig {
        walks_per_node: 60,
        walk_length: 201,
        ..WalkConfig::default()
    };
    let walks = generate_walks(&g, &cfg).unwrap();
    let mut counts = [[0usize; 3]; 3];
    for w in &walks {
        for s in w.windows(2) {
            counts[s[0]][s[1]] += 1;
        }
    }
    for (v, row) in counts.iter().enumerate() {
        let total: usize = row.iter().sum();
        assert!(total >= 10_000);
        for (x, &c) in row.iter().enumerate() {
            if x != v {
                let f = c as f64 / total as f64;
                assert!((f - 0.5).abs() < 0.02, "{v}->{x}: {f}");
            }
        }
    }
}

#[test]
fn biased_step_frequencies() {
    let g = graph(4, &[(0, 1), (1, 2), (0, 2), (1, 3)]);
    let cfg = WalkConfig {
        p: 0.5,
        q: 2.0,
        ..WalkConfig::default()
    };
    let mut rng = seeded(11);
    let mut counts = [0usize; 4];
    let steps = 10_000;
    for _ in 0..steps {
        counts[sample_next(&g, Some(0), 1, &cfg, &mut rng)] += 1;
    }
    for (x, expect) in [(0, 4.0 / 7.0), (2, 2.0 / 7.0), (3, 1.0 / 7.0)] {
        let f = counts[x] as f64 / steps as f64;
        assert!((f - expect).abs() < 0.02, "{x}: {f} vs {expect}");
    }
}

#[test]
fn solitary_authors_get_exact_zero_profiles() {
    let docs = vec![DocumentRecord::new("t1", "a", "hello", None)];
    let mut corpus = Corpus::new(docs).unwrap();
    for id in ["b", "c", "d", "s1", "s2", "s3"] {
        corpus.register_author(id);
    }
    let edges: EdgeList = [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]
        .into_iter().collect();
    for g in [build_community_graph(&corpus, &edges).unwrap(), build_extended_graph(&corpus, &edges).unwrap()] {
        let emb = node2vec(&g, &quick_walks(1), &quick_skipgram(), &mut seeded(2)).unwrap();
        let profiles = author_profiles(&emb, &g);
        assert_eq!(profiles.dim(), PROFILE_DIM);
        for s in ["s1", "s2", "s3"] {
            assert!(profiles.get(s).unwrap().iter().all(|&v| v == 0.0));
        }
        for a in ["a", "b", "c", "d"] {
            assert!(profiles.get(a).unwrap().iter().any(|&v| v != 0.0));
        }
    }
}

#[test]
fn embeddings_are_deterministic() {
    let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
    let a = node2vec(&g, &quick_walks(4), &quick_skipgram(), &mut seeded(9)).unwrap();
    let b = node2vec(&g, &quick_walks(4), &quick_skipgram(), &mut seeded(9)).unwrap();
    assert_eq!(a, b);
    let c = node2vec(&g, &quick_walks(5), &quick_skipgram(), &mut seeded(9)).unwrap();
    assert_ne!(a, c);
}

fn mean_cosines(vectors: &[&[f64]], group: &[usize]) -> (f64, f64) {
    let (mut intra, mut ni, mut inter, mut nx) = (0.0, 0, 0.0, 0);
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let c = cosine(vectors[i], vectors[j]);
            if group[i] == group[j] {
                intra += c;
                ni += 1;
            } else {
                inter += c;
                nx += 1;
            }
        }
    }
    (intra / ni as f64, inter / nx as f64)
}

#[test]
fn two_cliques_separate() {
    let mut edges = Vec::new();
    for base in [0, 6] {
        for a in 0..6 {
            for b in a + 1..6 {
                edges.push((base + a, base + b));
            }
        }
    }
    edges.push((5, 6));
    let g = graph(12, &edges);
    let emb = node2vec(&g, &quick_walks(3), &quick_skipgram(), &mut seeded(3)).unwrap();
    let rows: Vec<&[f64]> = (0..12).map(|i| emb.vectors.row(i)).collect();
    let group: Vec<usize> = (0..12).map(|i| i / 6).collect();
    let (intra, inter) = mean_cosines(&rows, &group);
    assert!(intra > inter + 0.2, "{intra} vs {inter}");
}

#[test]
fn planted_communities_cluster() {
    for seed in 0..3 {
        let data = generate_synthetic_with_truth(&SynthConfig {
            seed,
            n_docs: 200,
            ..SynthConfig::default()
        })
        .unwrap();
        let g = build_community_graph(&data.corpus, &data.edges).unwrap();
        let emb = node2vec(&g, &quick_walks(seed), &quick_skipgram(), &mut seeded(seed)).unwrap();
        let keep: Vec<usize> = (0..g.n_nodes()).filter(|&i| !g.is_solitary(i)).collect();
        let rows: Vec<&[f64]> = keep.iter().map(|&i| emb.vectors.row(i)).collect();
        let group: Vec<usize> = keep.iter().map(|&i| data.communities[i]).collect();
        let (intra, inter) = mean_cosines(&rows, &group);
        assert!(intra > inter, "seed {seed}: {intra} vs {inter}");
    }
}
