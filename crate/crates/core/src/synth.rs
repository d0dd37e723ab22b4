//! Planted-community corpus generator.
//!
//! Authors are split into communities, each with a dominant class. Follower
//! edges fall inside a community with probability scaled by `homophily`.
//! Every author leans towards its community's class, every document's label
//! leans towards its author's class, and document text mixes shared filler
//! tokens with tokens from a class-specific block, so both n-gram and
//! bag-of-words features carry a learnable but noisy signal.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::Rng as _;

use crate::corpus::{Class, Corpus, DocumentRecord, EdgeList};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded, Rng, Stream};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SynthConfig {
    pub n_authors: usize,
    pub n_docs: usize,
    pub n_communities: usize,
    /// Expected fraction of follower edges that stay inside a community.
    pub homophily: f64,
    /// Background class distribution (racism, sexism, clean).
    pub class_mix: [f64; 3],
    pub vocab_size: usize,
    pub seed: u64,
    /// Expected follower edges per author.
    pub avg_degree: f64,
    /// Tokens per document.
    pub doc_length: usize,
    /// Probability that a token comes from the label's class block.
    pub text_signal: f64,
    /// Probability that an author takes its community's class.
    pub author_purity: f64,
    /// Probability that a document takes its author's class.
    pub label_consistency: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_authors: 200,
            n_docs: 2000,
            n_communities: 4,
            homophily: 0.9,
            class_mix: [0.12, 0.194, 0.686],
            vocab_size: 600,
            seed: 7,
            avg_degree: 4.0,
            doc_length: 8,
            text_signal: 0.15,
            author_purity: 0.8,
            label_consistency: 0.85,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_authors == 0 || self.n_docs == 0 || self.n_communities == 0 || self.doc_length == 0 {
            return bad("synth.n_authors, n_docs, n_communities and doc_length must be positive".into());
        }
        if self.n_communities > self.n_authors {
            return bad(format!(
                "synth.n_communities ({}) exceeds synth.n_authors ({})",
                self.n_communities, self.n_authors
            ));
        }
        if self.vocab_size < 6 {
            return bad("synth.vocab_size must be at least 6".into());
        }
        for (name, p) in [
            ("homophily", self.homophily),
            ("text_signal", self.text_signal),
            ("author_purity", self.author_purity),
            ("label_consistency", self.label_consistency),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("synth.{name} must lie in [0, 1]"));
            }
        }
        if self.class_mix.iter().any(|&p| !(0.0..=1.0).contains(&p))
            || (self.class_mix.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return bad("synth.class_mix must be three probabilities summing to 1".into());
        }
        if !(self.avg_degree >= 0.0 && self.avg_degree.is_finite()) {
            return bad("synth.avg_degree must be a nonnegative number".into());
        }
        Ok(())
    }
}

/// Generated data plus the planted ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub corpus: Corpus,
    pub edges: EdgeList,
    /// Community of each author, in corpus author order.
    pub communities: Vec<usize>,
    pub community_class: Vec<Class>,
    pub author_class: Vec<Class>,
    /// Per-pair edge probabilities actually used.
    pub p_intra: f64,
    pub p_inter: f64,
}

fn author_id(i: usize) -> String {
    format!("u{i:05}")
}

fn sample_class(mix: &[f64; 3], rng: &mut Rng) -> Class {
    let u: f64 = rng.gen();
    if u < mix[0] {
        Class::Racism
    } else if u < mix[0] + mix[1] {
        Class::Sexism
    } else {
        Class::Clean
    }
}

pub fn generate_synthetic(config: &SynthConfig) -> Result<(Corpus, EdgeList)> {
    let d = generate_synthetic_with_truth(config)?;
    Ok((d.corpus, d.edges))
}

pub fn generate_synthetic_with_truth(config: &SynthConfig) -> Result<SyntheticData> {
    config.validate()?;
    let mut rng = seeded(derive_seed(&[config.seed, Stream::Synth as u64]));
    let n = config.n_authors;
    let k = config.n_communities;

    // Round-robin partition keeps communities within one member of each other.
    let communities: Vec<usize> = (0..n).map(|i| i % k).collect();
    // The first three communities cover the three classes; the rest draw
    // from the background mix.
    let community_class: Vec<Class> = (0..k)
        .map(|c| match Class::from_index(c) {
            Some(cls) if k >= 3 => cls,
            _ => sample_class(&config.class_mix, &mut rng),
        })
        .collect();
    let author_class: Vec<Class> = communities
        .iter()
        .map(|&c| {
            if rng.gen_bool(config.author_purity) {
                community_class[c]
            } else {
                sample_class(&config.class_mix, &mut rng)
            }
        })
        .collect();

    // Per-pair probabilities chosen so that `homophily` of the expected
    // `n * avg_degree / 2` edges are intra-community.
    let mut sizes = alloc::vec![0usize; k];
    for &c in &communities {
        sizes[c] += 1;
    }
    let intra_pairs: usize = sizes.iter().map(|&s| s * s.saturating_sub(1) / 2).sum();
    let inter_pairs = n * (n - 1) / 2 - intra_pairs;
    let expected_edges = n as f64 * config.avg_degree / 2.0;
    let p_intra = if intra_pairs > 0 {
        (config.homophily * expected_edges / intra_pairs as f64).min(1.0)
    } else {
        0.0
    };
    let p_inter = if inter_pairs > 0 {
        ((1.0 - config.homophily) * expected_edges / inter_pairs as f64).min(1.0)
    } else {
        0.0
    };
    let ids: Vec<String> = (0..n).map(author_id).collect();
    let mut edges = EdgeList::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = if communities[a] == communities[b] { p_intra } else { p_inter };
            if p > 0.0 && rng.gen::<f64>() < p {
                edges.insert(&ids[a], &ids[b])?;
            }
        }
    }

    // Vocabulary: shared filler block first, then one block per class.
    let block = config.vocab_size / 6;
    let shared = config.vocab_size - 3 * block;
    let mut docs = Vec::with_capacity(config.n_docs);
    for j in 0..config.n_docs {
        let a = rng.gen_range(0..n);
        let label = if rng.gen_bool(config.label_consistency) {
            author_class[a]
        } else {
            sample_class(&config.class_mix, &mut rng)
        };
        let mut words = Vec::with_capacity(config.doc_length);
        for _ in 0..config.doc_length {
            let w = if rng.gen_bool(config.text_signal) {
                shared + label.index() * block + rng.gen_range(0..block)
            } else {
                rng.gen_range(0..shared)
            };
            words.push(format!("w{w}"));
        }
        docs.push(DocumentRecord::new(format!("t{j:06}"), ids[a].clone(), words.join(" "), Some(label)));
    }
    let corpus = Corpus::with_authors(&ids, docs)?;
    Ok(SyntheticData {
        corpus,
        edges,
        communities,
        community_class,
        author_class,
        p_intra,
        p_inter,
    })
}
