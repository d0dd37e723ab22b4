use alloc::vec::Vec;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::HeteroGraph;
use crate::rng::{derive_seed, seeded, Rng};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct WalkConfig {
    /// Return parameter: weight `1/p` for stepping back to the previous node.
    pub p: f64,
    /// In-out parameter: weight `1/q` for moving two hops away.
    pub q: f64,
    pub walks_per_node: usize,
    /// Maximum walk length in nodes, start included.
    pub walk_length: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            p: 1.0,
            q: 1.0,
            walks_per_node: 10,
            walk_length: 80,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.q > 0.0) {
            return Err(Error::InvalidConfig("walk.p and walk.q must be positive".into()));
        }
        if self.walks_per_node == 0 || self.walk_length == 0 {
            return Err(Error::InvalidConfig(
                "walk.walks_per_node and walk.walk_length must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Next-hop distribution from `cur` given the previous node. Unnormalized
/// weights are `1/p` back to `prev`, `1` to neighbors of `prev`, `1/q`
/// otherwise; the first step (`prev = None`) is uniform.
pub fn transition_distribution(
    graph: &HeteroGraph,
    prev: Option<usize>,
    cur: usize,
    p: f64,
    q: f64,
) -> Result<Vec<(usize, f64)>> {
    let nbrs = graph.neighbors(cur);
    if nbrs.is_empty() {
        return Err(Error::IsolatedNode(cur));
    }
    let weights: Vec<f64> = nbrs
        .iter()
        .map(|&x| match prev {
            None => 1.0,
            Some(t) if x == t => 1.0 / p,
            Some(t) if graph.has_edge(t, x) => 1.0,
            Some(_) => 1.0 / q,
        })
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(nbrs.iter().zip(weights).map(|(&x, w)| (x, w / total)).collect())
}

/// Draws one step of a walk; `cur` must have neighbors.
pub fn sample_next(graph: &HeteroGraph, prev: Option<usize>, cur: usize, cfg: &WalkConfig, rng: &mut Rng) -> usize {
    let nbrs = graph.neighbors(cur);
    if prev.is_none() || (cfg.p == 1.0 && cfg.q == 1.0) {
        return nbrs[rng.gen_range(0..nbrs.len())];
    }
    let dist = transition_distribution(graph, prev, cur, cfg.p, cfg.q).expect("cur has neighbors");
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(x, pr) in &dist {
        acc += pr;
        if u < acc {
            return x;
        }
    }
    dist[dist.len() - 1].0
}

/// `walks_per_node` rounds; each round walks once from every non-solitary
/// node in index order. Walk `r` from node `v` draws from its own stream
/// seeded by `(seed, v, r)`.
pub fn generate_walks(graph: &HeteroGraph, config: &WalkConfig) -> Result<Vec<Vec<usize>>> {
    config.validate()?;
    let mut walks = Vec::new();
    for round in 0..config.walks_per_node {
        for start in 0..graph.n_nodes() {
            if graph.is_solitary(start) {
                continue;
            }
            let mut rng = seeded(derive_seed(&[config.seed, start as u64, round as u64]));
            let mut walk = Vec::with_capacity(config.walk_length);
            walk.push(start);
            let mut prev = None;
            while walk.len() < config.walk_length {
                let cur = *walk.last().unwrap();
                let next = sample_next(graph, prev, cur, config, &mut rng);
                prev = Some(cur);
                walk.push(next);
            }
            walks.push(walk);
        }
    }
    Ok(walks)
}
