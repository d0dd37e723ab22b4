//! Subcommand implementations. Each returns the files it wrote plus a
//! human-readable summary; all outputs go under the configured output
//! directory and are byte-identical across reruns with the same config.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use commgraph_core::corpus::validate;
use commgraph_core::eval::{aggregate, build_run, render_text_report, run_logreg_config, run_once, RunResult};
use commgraph_core::features::build_word_vocab;
use commgraph_core::gcn::extract_embeddings;
use commgraph_core::graph::{build_community_graph, build_extended_graph, NormalizedAdjacency};
use commgraph_core::logreg::{predict_logreg, train_logreg};
use commgraph_core::methods::{design_matrix, run_method, MethodKind, ProfileSource};
use commgraph_core::synth::generate_synthetic;
use commgraph_core::{Class, Corpus, EdgeList, ValidationReport};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::error::{Context, Error, Result};
use crate::io::{
    fingerprint_hex, format_embeddings, format_graph, format_predictions, format_tsv, format_vocab, load_checkpoint,
    load_corpus, load_edges, save_checkpoint, save_edges, write_file, Checkpoint, PredictionRow, CHECKPOINT_FORMAT,
};
use crate::report::{class_summary, predictions_csv, report_json, runs_csv};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Dataset {
    pub corpus: Corpus,
    pub edges: EdgeList,
    /// Computed before edge-only authors are registered.
    pub validation: ValidationReport,
}

/// Loads `[data]` or generates `[synth]`. Authors that only appear in the
/// edge file are added to the corpus as document-less authors.
pub fn load_dataset(cfg: &PipelineConfig) -> Result<Dataset> {
    let (mut corpus, edges) = match (&cfg.data, &cfg.synth) {
        (Some(d), _) => {
            let corpus = load_corpus(&d.corpus, d.corpus_format())?;
            let edges = match &d.edges {
                Some(p) => load_edges(p)?,
                None => EdgeList::new(),
            };
            (corpus, edges)
        }
        (None, Some(s)) => generate_synthetic(s).context("synthetic data")?,
        (None, None) => return Err(Error::Usage("config has neither [data] nor [synth]".into())),
    };
    let validation = validate(&corpus, &edges);
    for id in &validation.unknown_authors {
        corpus.register_author(id);
    }
    Ok(Dataset {
        corpus,
        edges,
        validation,
    })
}

#[derive(Debug, Default)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

struct Outputs {
    dir: PathBuf,
    written: Vec<(String, String)>,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            files: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(name);
        write_file(&path, contents.as_ref())?;
        self.written.push((name.to_string(), hex::encode(Sha256::digest(contents.as_ref()))));
        self.files.push(path);
        Ok(())
    }

    /// Writes `<command>_manifest.json` listing every output with its hash.
    fn finish(mut self, command: &str, cfg: &PipelineConfig, summary: String) -> Result<CommandOutput> {
        #[derive(Serialize)]
        struct OutputFile<'a> {
            file: &'a str,
            sha256: &'a str,
        }
        #[derive(Serialize)]
        struct Manifest<'a> {
            tool: &'a str,
            version: &'a str,
            command: &'a str,
            seed: u64,
            config_sha256: String,
            config: &'a PipelineConfig,
            outputs: Vec<OutputFile<'a>>,
        }
        let m = Manifest {
            tool: "commgraph",
            version: TOOL_VERSION,
            command,
            seed: cfg.seed,
            config_sha256: cfg.sha256(),
            config: cfg,
            outputs: self
                .written
                .iter()
                .map(|(f, h)| OutputFile { file: f, sha256: h })
                .collect(),
        };
        let mut json = serde_json::to_string_pretty(&m).expect("manifest serializes");
        json.push('\n');
        let path = self.dir.join(format!("{command}_manifest.json"));
        write_file(&path, json)?;
        self.files.push(path);
        Ok(CommandOutput {
            files: self.files,
            summary,
        })
    }
}

fn dataset_summary(d: &Dataset) -> String {
    let v = &d.validation;
    format!(
        "documents: {}\nauthors: {}\nedges: {}\nclasses: {}\nunlabeled: {}\nempty texts: {}\nsolitary authors: {}\nunknown edge authors: {}\n",
        d.corpus.len(),
        d.corpus.n_authors(),
        d.edges.len(),
        class_summary(v.class_counts),
        v.unlabeled_count,
        v.empty_text_count,
        v.solitary_count,
        v.unknown_authors.len(),
    )
}

/// Writes `corpus.tsv` and `edges.txt` from the `[synth]` section.
pub fn cmd_synth(cfg: &PipelineConfig) -> Result<CommandOutput> {
    let synth = cfg
        .synth
        .as_ref()
        .ok_or_else(|| Error::Usage("synth needs a [synth] section in the config".into()))?;
    let (corpus, edges) = generate_synthetic(synth).context("synthetic data")?;
    let mut out = Outputs::new(&cfg.output);
    out.write("corpus.tsv", format_tsv(&corpus))?;
    let edge_path = cfg.output.join("edges.txt");
    save_edges(&edge_path, &edges)?;
    let text = std::fs::read(&edge_path).map_err(|e| Error::io(&edge_path, e))?;
    out.written.push(("edges.txt".into(), hex::encode(Sha256::digest(&text))));
    out.files.push(edge_path);
    let validation = validate(&corpus, &edges);
    let summary = dataset_summary(&Dataset {
        corpus,
        edges,
        validation,
    });
    out.finish("synth", cfg, summary)
}

/// Validation report plus dumps of both graphs.
pub fn cmd_build_graph(cfg: &PipelineConfig) -> Result<CommandOutput> {
    let d = load_dataset(cfg)?;
    let community = build_community_graph(&d.corpus, &d.edges).context("community graph")?;
    let extended = build_extended_graph(&d.corpus, &d.edges).context("extended graph")?;
    let mut out = Outputs::new(&cfg.output);
    let mut json = serde_json::to_string_pretty(&d.validation).expect("report serializes");
    json.push('\n');
    out.write("validation.json", json)?;
    out.write("community_graph.txt", format_graph(&community))?;
    out.write("extended_graph.txt", format_graph(&extended))?;
    out.write("vocab_words.txt", format_vocab(&build_word_vocab(&d.corpus, cfg.features.tokens)))?;
    let summary = format!(
        "{}community graph: {} nodes, {} edges\nextended graph: {} nodes, {} edges\n",
        dataset_summary(&d),
        community.n_nodes(),
        community.n_edges(),
        extended.n_nodes(),
        extended.n_edges()
    );
    out.finish("build-graph", cfg, summary)
}

/// Trains one method on the run-0 split: checkpoint, embeddings (for
/// profile-producing methods), vocabularies and test-set predictions.
pub fn cmd_train(cfg: &PipelineConfig, method: MethodKind) -> Result<CommandOutput> {
    let d = load_dataset(cfg)?;
    let exp = cfg.experiment();
    let build = build_run(&d.corpus, &d.edges, &exp, 0, &[method]).context("training")?;
    let mut out = Outputs::new(&cfg.output);
    let mut ckpt = Checkpoint {
        format: CHECKPOINT_FORMAT,
        tool_version: TOOL_VERSION.to_string(),
        method,
        config: cfg.clone(),
        word_vocab_fingerprint: None,
        ngram_vocab_fingerprint: None,
        gcn: None,
        logreg: None,
        node_vectors: None,
    };
    let tag = method.as_str();
    let mut summary = dataset_summary(&d);

    if let Some(g) = &build.gcn {
        ckpt.word_vocab_fingerprint = Some(fingerprint_hex(g.vocab.fingerprint()));
        ckpt.gcn = Some(g.model.clone());
        out.write("vocab_words.txt", format_vocab(&g.vocab))?;
        out.write(&format!("embeddings_{tag}.csv"), format_embeddings(&g.graph, &g.embeddings, None))?;
        summary.push_str(&format!(
            "gcn: best epoch {} of {}, {} embedding rows\n",
            g.best_epoch,
            g.stopped_epoch,
            g.graph.n_nodes()
        ));
    }
    for w in [&build.community, &build.extended].into_iter().flatten() {
        ckpt.node_vectors = Some(w.embeddings.vectors.clone());
        out.write(&format!("embeddings_{tag}.csv"), format_embeddings(&w.graph, &w.embeddings.vectors, None))?;
        let solitary = w.embeddings.solitary.iter().filter(|&&s| s).count();
        summary.push_str(&format!(
            "node2vec: {} nodes, {solitary} solitary with zero vectors\n",
            w.graph.n_nodes()
        ));
    }

    let split = &build.split;
    let (predictions, probs) = if method == MethodKind::Gcn {
        let logreg = run_logreg_config(&exp, 0);
        let o = run_method(&method.into(), &d.corpus, split, &build.artifacts, &logreg).context("gcn prediction")?;
        (o.predictions, o.probs)
    } else {
        let vocab = build.ngram_vocab.as_ref().expect("lr methods build n-grams");
        let ngrams = build.artifacts.ngrams.as_ref().expect("lr methods build n-grams");
        let profiles = method
            .profile_source()
            .map(|s: ProfileSource| build.artifacts.profiles(s))
            .transpose()
            .context("profiles")?;
        let fit = split.fit_rows();
        let y: Vec<Class> = fit.iter().map(|&i| d.corpus.documents()[i].label.expect("labeled split")).collect();
        let x = design_matrix(&d.corpus, ngrams, profiles, &fit).context("design matrix")?;
        let model = train_logreg(&x, &y, &run_logreg_config(&exp, 0)).context("logistic regression")?;
        let xt = design_matrix(&d.corpus, ngrams, profiles, &split.test).context("design matrix")?;
        let p = predict_logreg(&model, &xt).context("logistic regression")?;
        ckpt.ngram_vocab_fingerprint = Some(fingerprint_hex(vocab.fingerprint()));
        ckpt.logreg = Some(model);
        out.write("vocab_ngrams.txt", format_vocab(vocab))?;
        (p.labels, p.probs)
    };
    let rows = split.test.iter().enumerate().map(|(k, &i)| {
        let doc = &d.corpus.documents()[i];
        (
            Vec::new(),
            PredictionRow {
                doc_id: &doc.doc_id,
                gold: doc.label,
                predicted: predictions[k],
                probs: probs.row(k),
            },
        )
    });
    out.write(&format!("predictions_{tag}.csv"), format_predictions(&[], rows))?;
    let gold: Vec<Class> = split.test.iter().map(|&i| d.corpus.documents()[i].label.expect("labeled")).collect();
    let m = commgraph_core::eval::compute_metrics(&gold, &predictions).context("metrics")?;
    summary.push_str(&format!("test macro F1 (run 0): {:.4}\n", m.macro_avg.f1));

    let ckpt_path = cfg.output.join(format!("checkpoint_{tag}.json"));
    save_checkpoint(&ckpt_path, &ckpt)?;
    let bytes = std::fs::read(&ckpt_path).map_err(|e| Error::io(&ckpt_path, e))?;
    out.written.push((format!("checkpoint_{tag}.json"), hex::encode(Sha256::digest(&bytes))));
    out.files.push(ckpt_path);
    out.finish("train", cfg, summary)
}

/// Runs the experiment, using up to `jobs` worker threads across runs.
pub fn run_all(corpus: &Corpus, edges: &EdgeList, cfg: &PipelineConfig, jobs: usize) -> Result<Vec<RunResult>> {
    let exp = cfg.experiment();
    let n = exp.split.n_runs;
    if jobs <= 1 || n <= 1 {
        return (0..n).map(|r| run_once(corpus, edges, &exp, r).context("experiment run")).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<commgraph_core::Result<RunResult>>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.min(n) {
            s.spawn(|| loop {
                let r = next.fetch_add(1, Ordering::Relaxed);
                if r >= n {
                    break;
                }
                let res = run_once(corpus, edges, &exp, r);
                results.lock().expect("no worker panics while holding the lock")[r] = Some(res);
            });
        }
    });
    results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|r| r.expect("every run index claimed").context("experiment run"))
        .collect()
}

/// Full protocol: `report.json`, `report.txt`, `runs.csv`,
/// `predictions.csv` and a manifest.
pub fn cmd_evaluate(cfg: &PipelineConfig, jobs: usize) -> Result<CommandOutput> {
    let d = load_dataset(cfg)?;
    let runs = run_all(&d.corpus, &d.edges, cfg, jobs)?;
    let report = aggregate(&cfg.experiment(), &runs).context("aggregation")?;
    let text = render_text_report(&report);
    let mut out = Outputs::new(&cfg.output);
    out.write("report.json", report_json(&report))?;
    out.write("report.txt", &text)?;
    out.write("runs.csv", runs_csv(&report))?;
    out.write("predictions.csv", predictions_csv(&d.corpus, &runs))?;
    out.finish("evaluate", cfg, text)
}

/// Re-exports embeddings from a training checkpoint. GCN embeddings are
/// recomputed from the stored first-layer weights; the data must match the
/// checkpoint's vocabulary fingerprint.
pub fn cmd_export_embeddings(checkpoint: &Path, output: Option<&Path>) -> Result<CommandOutput> {
    let ckpt = load_checkpoint(checkpoint)?;
    let mut cfg = ckpt.config.clone();
    if let Some(o) = output {
        cfg.output = o.to_path_buf();
    }
    let d = load_dataset(&cfg)?;
    let tag = ckpt.method.as_str();
    let (graph, vectors) = if let Some(model) = &ckpt.gcn {
        let graph = build_extended_graph(&d.corpus, &d.edges).context("extended graph")?;
        let vocab = build_word_vocab(&d.corpus, cfg.features.tokens);
        let fp = fingerprint_hex(vocab.fingerprint());
        if ckpt.word_vocab_fingerprint.as_deref() != Some(fp.as_str()) {
            return Err(Error::config(checkpoint, "corpus vocabulary does not match the checkpoint"));
        }
        let features = commgraph_core::features::build_feature_matrix(&graph, &d.corpus, &vocab, cfg.features.tokens)
            .context("features")?;
        let adj = NormalizedAdjacency::from_graph(&graph);
        let e = extract_embeddings(&adj, &features.matrix, model).context("embeddings")?;
        (graph, e)
    } else if let Some(v) = &ckpt.node_vectors {
        let graph = match ckpt.method {
            MethodKind::LrAuth => build_community_graph(&d.corpus, &d.edges).context("community graph")?,
            _ => build_extended_graph(&d.corpus, &d.edges).context("extended graph")?,
        };
        if graph.n_nodes() != v.rows() {
            return Err(Error::config(checkpoint, "graph size does not match the stored vectors"));
        }
        (graph, v.clone())
    } else {
        return Err(Error::Usage(format!("checkpoint for method {tag} holds no embeddings")));
    };
    let mut out = Outputs::new(&cfg.output);
    out.write(&format!("embeddings_{tag}.csv"), format_embeddings(&graph, &vectors, None))?;
    let summary = format!("{} embedding rows x {} dims\n", vectors.rows(), vectors.cols());
    out.finish("export-embeddings", &cfg, summary)
}
