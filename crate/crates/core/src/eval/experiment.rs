use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Class, Corpus, EdgeList};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::features::{
    build_char_ngram_vocab, build_feature_matrix, build_word_vocab, char_ngram_matrix, TokenOptions, Vocabulary,
};
use crate::gcn::{extract_embeddings, forward, train, GcnModel, LabelMask, TrainConfig};
use crate::graph::{build_community_graph, build_extended_graph, HeteroGraph, NodeKind, NormalizedAdjacency};
use crate::logreg::LogRegConfig;
use crate::methods::{run_method, DocSplit, MethodKind, RunArtifacts};
use crate::node2vec::{author_profiles, node2vec, NodeEmbeddings, SkipGramConfig, WalkConfig};
use crate::profiles::AuthorProfiles;
use crate::rng::{derive_seed, stream, Stream};

use super::metrics::{compute_metrics, MetricsRow};
use super::split::{stratified_split, SplitSpec};
use super::stats::{paired_t_test, SignificanceResult};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FeatureConfig {
    pub tokens: TokenOptions,
    /// Longest character n-gram for the LR methods.
    pub ngram_max: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            tokens: TokenOptions::default(),
            ngram_max: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ExperimentConfig {
    pub methods: Vec<MethodKind>,
    pub split: SplitSpec,
    pub features: FeatureConfig,
    pub walk: WalkConfig,
    pub skipgram: SkipGramConfig,
    pub gcn: TrainConfig,
    pub logreg: LogRegConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            methods: MethodKind::ALL.to_vec(),
            split: SplitSpec::default(),
            features: FeatureConfig::default(),
            walk: WalkConfig::default(),
            skipgram: SkipGramConfig::default(),
            gcn: TrainConfig::default(),
            logreg: LogRegConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("methods must list at least one method".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::InvalidConfig(format!("method {m} listed twice")));
            }
        }
        if self.features.ngram_max == 0 {
            return Err(Error::InvalidConfig("features.ngram_max must be at least 1".into()));
        }
        self.split.validate()?;
        self.walk.validate()?;
        self.skipgram.validate()?;
        self.gcn.validate()?;
        self.logreg.validate()
    }

    /// Requested methods in table order, independent of listing order.
    pub fn ordered_methods(&self) -> Vec<MethodKind> {
        MethodKind::ALL.into_iter().filter(|k| self.methods.contains(k)).collect()
    }
}

/// One method's outcome in one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRun {
    pub method: MethodKind,
    pub metrics: MetricsRow,
    pub predictions: Vec<Class>,
    pub probs: DenseMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run: usize,
    /// Corpus indices of the test documents, shared by every method.
    pub test_docs: Vec<usize>,
    /// In table order.
    pub methods: Vec<MethodRun>,
    pub gcn_best_epoch: Option<usize>,
    pub gcn_stopped_epoch: Option<usize>,
}

/// Artifacts of a GCN fit on the extended graph.
#[derive(Debug, Clone)]
pub struct GcnArtifacts {
    pub graph: HeteroGraph,
    /// Word vocabulary behind the input features.
    pub vocab: Vocabulary,
    /// Best-epoch parameters.
    pub model: GcnModel,
    pub probs: DenseMatrix,
    pub embeddings: DenseMatrix,
    pub profiles: AuthorProfiles,
    pub best_epoch: usize,
    pub stopped_epoch: usize,
}

/// Trains the GCN on the extended graph with labels on the `train` documents
/// and early stopping on the `val` documents.
pub fn fit_gcn(
    corpus: &Corpus,
    edges: &EdgeList,
    train_docs: &[usize],
    val_docs: &[usize],
    tokens: TokenOptions,
    gcn: &TrainConfig,
) -> Result<GcnArtifacts> {
    let graph = build_extended_graph(corpus, edges)?;
    let vocab = build_word_vocab(corpus, tokens);
    let features = build_feature_matrix(&graph, corpus, &vocab, tokens)?;
    let adj = NormalizedAdjacency::from_graph(&graph);
    let nodes = doc_nodes(corpus, &graph)?;
    // Test labels never enter the mask.
    let mut labels = alloc::vec![None; graph.n_nodes()];
    for &d in train_docs.iter().chain(val_docs) {
        labels[nodes[d]] = corpus.documents()[d].label.map(Class::index);
    }
    let train_nodes: Vec<usize> = train_docs.iter().map(|&d| nodes[d]).collect();
    let val_nodes: Vec<usize> = val_docs.iter().map(|&d| nodes[d]).collect();
    let mask = LabelMask::from_indices(labels, &train_nodes, &val_nodes)?;
    mask.check_node_kinds(&graph)?;
    let fit = train(&adj, &features.matrix, &mask, gcn)?;
    let probs = forward(&adj, &features.matrix, &fit.model, None)?.probs;
    let embeddings = extract_embeddings(&adj, &features.matrix, &fit.model)?;
    let profiles = AuthorProfiles::from_node_matrix(&graph, &embeddings)?;
    Ok(GcnArtifacts {
        graph,
        vocab,
        model: fit.model,
        probs,
        embeddings,
        profiles,
        best_epoch: fit.best_epoch,
        stopped_epoch: fit.stopped_epoch,
    })
}

/// Extended-graph node index of every corpus document.
pub fn doc_nodes(corpus: &Corpus, graph: &HeteroGraph) -> Result<Vec<usize>> {
    corpus
        .documents()
        .iter()
        .map(|d| {
            graph
                .index_of(&d.doc_id, NodeKind::Document)
                .ok_or_else(|| Error::InvalidConfig(format!("document `{}` missing from graph", d.doc_id)))
        })
        .collect()
}

pub fn split_documents(corpus: &Corpus, spec: &SplitSpec, run: usize) -> Result<DocSplit> {
    let (docs, labels): (Vec<usize>, Vec<Class>) = corpus
        .documents()
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.label.map(|l| (i, l)))
        .unzip();
    let s = stratified_split(&labels, spec, run)?;
    let map = |v: Vec<usize>| v.into_iter().map(|i| docs[i]).collect();
    Ok(DocSplit {
        train: map(s.train),
        val: map(s.val),
        test: map(s.test),
    })
}

/// Node vectors and the graph they were trained on.
#[derive(Debug, Clone)]
pub struct WalkArtifacts {
    pub graph: HeteroGraph,
    pub embeddings: NodeEmbeddings,
}

/// Shared inputs of one run, plus the intermediate models that produced
/// them.
#[derive(Debug, Clone)]
pub struct RunBuild {
    pub split: DocSplit,
    pub artifacts: RunArtifacts,
    pub ngram_vocab: Option<Vocabulary>,
    pub gcn: Option<GcnArtifacts>,
    pub community: Option<WalkArtifacts>,
    pub extended: Option<WalkArtifacts>,
}

fn needs(methods: &[MethodKind], kinds: &[MethodKind]) -> bool {
    methods.iter().any(|m| kinds.contains(m))
}

/// Split, features, profiles and GCN for run `run`, restricted to what
/// `methods` require. All randomness derives from `(split.base_seed, run)`
/// and a per-component tag, so the result for a component does not depend
/// on which other components are built.
pub fn build_run(
    corpus: &Corpus,
    edges: &EdgeList,
    config: &ExperimentConfig,
    run: usize,
    methods: &[MethodKind],
) -> Result<RunBuild> {
    let base = config.split.base_seed;
    let split = split_documents(corpus, &config.split, run)?;
    let tokens = config.features.tokens;
    let mut artifacts = RunArtifacts::default();
    let mut ngram_vocab = None;
    let mut gcn = None;

    if needs(methods, &[MethodKind::Lr, MethodKind::LrAuth, MethodKind::LrExtd, MethodKind::LrGcn]) {
        let fit_texts: Vec<&str> = split
            .fit_rows()
            .iter()
            .map(|&d| corpus.documents()[d].text.as_str())
            .collect();
        let vocab = build_char_ngram_vocab(&fit_texts, config.features.ngram_max, tokens)?;
        let all_texts: Vec<&str> = corpus.documents().iter().map(|d| d.text.as_str()).collect();
        artifacts.ngrams = Some(char_ngram_matrix(&all_texts, &vocab, tokens));
        ngram_vocab = Some(vocab);
    }
    if needs(methods, &[MethodKind::Gcn, MethodKind::LrGcn]) {
        let gcn_cfg = TrainConfig {
            seed: derive_seed(&[base, run as u64]),
            ..config.gcn.clone()
        };
        let g = fit_gcn(corpus, edges, &split.train, &split.val, tokens, &gcn_cfg)?;
        artifacts.doc_nodes = Some(doc_nodes(corpus, &g.graph)?);
        artifacts.gcn_probs = Some(g.probs.clone());
        artifacts.gcn_profiles = Some(g.profiles.clone());
        gcn = Some(g);
    }
    let walk = |graph: HeteroGraph, walk_tag: Stream, sg_tag: Stream| -> Result<WalkArtifacts> {
        let walk = WalkConfig {
            seed: derive_seed(&[base, run as u64, walk_tag as u64]),
            ..config.walk.clone()
        };
        let mut rng = stream(base, run as u64, sg_tag);
        let embeddings = node2vec(&graph, &walk, &config.skipgram, &mut rng)?;
        Ok(WalkArtifacts { graph, embeddings })
    };
    let mut community = None;
    let mut extended = None;
    if needs(methods, &[MethodKind::LrAuth]) {
        let w = walk(build_community_graph(corpus, edges)?, Stream::WalksCommunity, Stream::SkipGramCommunity)?;
        artifacts.community_profiles = Some(author_profiles(&w.embeddings, &w.graph));
        community = Some(w);
    }
    if needs(methods, &[MethodKind::LrExtd]) {
        let w = walk(build_extended_graph(corpus, edges)?, Stream::WalksExtended, Stream::SkipGramExtended)?;
        artifacts.extended_profiles = Some(author_profiles(&w.embeddings, &w.graph));
        extended = Some(w);
    }
    Ok(RunBuild {
        split,
        artifacts,
        ngram_vocab,
        gcn,
        community,
        extended,
    })
}

/// Logistic-regression settings for run `run`.
pub fn run_logreg_config(config: &ExperimentConfig, run: usize) -> LogRegConfig {
    LogRegConfig {
        seed: derive_seed(&[config.split.base_seed, run as u64, Stream::LogReg as u64]),
        ..config.logreg
    }
}

/// One run: build the shared artifacts, then evaluate every requested
/// method on the shared test split.
pub fn run_once(corpus: &Corpus, edges: &EdgeList, config: &ExperimentConfig, run: usize) -> Result<RunResult> {
    config.validate()?;
    let methods = config.ordered_methods();
    let build = build_run(corpus, edges, config, run, &methods)?;
    let gold: Vec<Class> = build
        .split
        .test
        .iter()
        .map(|&d| corpus.documents()[d].label.expect("split holds labeled documents"))
        .collect();
    let logreg = run_logreg_config(config, run);
    let results = methods
        .into_iter()
        .map(|kind| {
            let out = run_method(&kind.into(), corpus, &build.split, &build.artifacts, &logreg)?;
            Ok(MethodRun {
                method: kind,
                metrics: compute_metrics(&gold, &out.predictions)?,
                predictions: out.predictions,
                probs: out.probs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunResult {
        run,
        test_docs: build.split.test,
        methods: results,
        gcn_best_epoch: build.gcn.as_ref().map(|g| g.best_epoch),
        gcn_stopped_epoch: build.gcn.as_ref().map(|g| g.stopped_epoch),
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MethodSummary {
    pub method: MethodKind,
    pub label: String,
    pub mean: MetricsRow,
    pub per_run: Vec<MetricsRow>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairwiseTest {
    /// The test is on per-run macro F1 of `a` minus `b`.
    pub a: MethodKind,
    pub b: MethodKind,
    pub result: SignificanceResult,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SignificanceBlock {
    /// `"ok"` or `"insufficient runs"`.
    pub status: String,
    pub metric: String,
    pub tests: Vec<PairwiseTest>,
}

impl SignificanceBlock {
    pub fn find(&self, a: MethodKind, b: MethodKind) -> Option<&PairwiseTest> {
        self.tests.iter().find(|t| t.a == a && t.b == b)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunSummary {
    pub run: usize,
    pub test_size: usize,
    pub gcn_best_epoch: Option<usize>,
    pub gcn_stopped_epoch: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentReport {
    pub n_runs: usize,
    pub methods: Vec<MethodSummary>,
    pub significance: SignificanceBlock,
    pub runs: Vec<RunSummary>,
}

impl ExperimentReport {
    pub fn method(&self, kind: MethodKind) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == kind)
    }
}

/// Joins finished runs (in any order) into a report. Every later method in
/// table order is tested against every earlier one.
pub fn aggregate(config: &ExperimentConfig, runs: &[RunResult]) -> Result<ExperimentReport> {
    let mut runs: Vec<&RunResult> = runs.iter().collect();
    runs.sort_by_key(|r| r.run);
    let order = config.ordered_methods();
    let mut methods = Vec::with_capacity(order.len());
    for &kind in &order {
        let per_run = runs
            .iter()
            .map(|r| {
                r.methods
                    .iter()
                    .find(|m| m.method == kind)
                    .map(|m| m.metrics)
                    .ok_or(Error::MissingArtifact("method result in run"))
            })
            .collect::<Result<Vec<_>>>()?;
        methods.push(MethodSummary {
            method: kind,
            label: String::from(kind.label()),
            mean: MetricsRow::mean(&per_run),
            per_run,
        });
    }
    let mut tests = Vec::new();
    let status = if runs.len() < 2 {
        String::from("insufficient runs")
    } else {
        for j in 0..methods.len() {
            for i in 0..j {
                let a: Vec<f64> = methods[j].per_run.iter().map(|m| m.macro_avg.f1).collect();
                let b: Vec<f64> = methods[i].per_run.iter().map(|m| m.macro_avg.f1).collect();
                tests.push(PairwiseTest {
                    a: methods[j].method,
                    b: methods[i].method,
                    result: paired_t_test(&a, &b)?,
                });
            }
        }
        String::from("ok")
    };
    Ok(ExperimentReport {
        n_runs: runs.len(),
        methods,
        significance: SignificanceBlock {
            status,
            metric: String::from("macro_f1"),
            tests,
        },
        runs: runs
            .iter()
            .map(|r| RunSummary {
                run: r.run,
                test_size: r.test_docs.len(),
                gcn_best_epoch: r.gcn_best_epoch,
                gcn_stopped_epoch: r.gcn_stopped_epoch,
            })
            .collect(),
    })
}

/// Sequential driver over `config.split.n_runs` runs.
pub fn run_experiment(corpus: &Corpus, edges: &EdgeList, config: &ExperimentConfig) -> Result<ExperimentReport> {
    let runs = (0..config.split.n_runs)
        .map(|r| run_once(corpus, edges, config, r))
        .collect::<Result<Vec<_>>>()?;
    aggregate(config, &runs)
}
