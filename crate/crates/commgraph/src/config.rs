//! Pipeline configuration: one TOML file, or the `config` object embedded in
//! a manifest written by a previous command.
//!
//! ```toml
//! seed = 7
//! output = "out"
//! methods = ["lr", "lr_gcn"]
//!
//! [data]
//! corpus = "corpus.tsv"
//! edges = "edges.txt"
//!
//! [split]
//! n_runs = 10
//! ```
//!
//! Exactly one of `[data]` and `[synth]` must be present. The top-level
//! `seed` is the only seed: per-section seed keys are rejected.

use std::path::{Path, PathBuf};

use commgraph_core::eval::{ExperimentConfig, FeatureConfig, SplitSpec};
use commgraph_core::gcn::TrainConfig;
use commgraph_core::logreg::LogRegConfig;
use commgraph_core::methods::MethodKind;
use commgraph_core::node2vec::{SkipGramConfig, WalkConfig};
use commgraph_core::synth::SynthConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{read_to_string, CorpusFormat};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub corpus: PathBuf,
    /// Inferred from the corpus extension when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<CorpusFormat>,
    /// Follower edges; no file means no edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<PathBuf>,
}

impl DataConfig {
    pub fn corpus_format(&self) -> CorpusFormat {
        self.format.unwrap_or_else(|| CorpusFormat::from_path(&self.corpus))
    }
}

fn default_output() -> PathBuf {
    PathBuf::from("commgraph-out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub output: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<DataConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
    pub methods: Vec<MethodKind>,
    pub features: FeatureConfig,
    pub walk: WalkConfig,
    pub skipgram: SkipGramConfig,
    pub gcn: TrainConfig,
    pub logreg: LogRegConfig,
    pub split: SplitSpec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let e = ExperimentConfig::default();
        Self {
            seed: 0,
            output: default_output(),
            data: None,
            synth: None,
            methods: e.methods,
            features: e.features,
            walk: e.walk,
            skipgram: e.skipgram,
            gcn: e.gcn,
            logreg: e.logreg,
            split: e.split,
        }
    }
}

const SEEDED_SECTIONS: [(&str, &str); 5] = [
    ("split", "base_seed"),
    ("synth", "seed"),
    ("walk", "seed"),
    ("gcn", "seed"),
    ("logreg", "seed"),
];

impl PipelineConfig {
    /// Parses TOML, resolves relative data and output paths against `base`,
    /// and copies the top-level seed into every component.
    pub fn from_toml(path: &Path, text: &str, base: &Path) -> Result<Self> {
        let value: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            let line = e.span().map_or(0, |s| text[..s.start].lines().count().max(1) as u64);
            Error::parse(path, line, e.message().to_string())
        })?;
        for (section, key) in SEEDED_SECTIONS {
            if value.get(section).and_then(|s| s.get(key)).is_some() {
                return Err(Error::config(path, format!("{section}.{key} is not allowed; set the top-level `seed`")));
            }
        }
        let mut cfg: PipelineConfig = value
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(path, e.message().to_string()))?;
        cfg.resolve_paths(base);
        cfg.apply_seed();
        cfg.validate().map_err(|m| Error::config(path, m))?;
        Ok(cfg)
    }

    /// Reads a TOML config, or a JSON manifest carrying a `config` object.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line() as u64, e.to_string()))?;
            let inner = v.get("config").cloned().ok_or_else(|| Error::config(path, "manifest has no `config` object"))?;
            let mut cfg: PipelineConfig =
                serde_json::from_value(inner).map_err(|e| Error::config(path, e.to_string()))?;
            cfg.apply_seed();
            cfg.validate().map_err(|m| Error::config(path, m))?;
            return Ok(cfg);
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(path, &text, &base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(d) = &mut self.data {
            join(&mut d.corpus);
            if let Some(e) = &mut d.edges {
                join(e);
            }
        }
        join(&mut self.output);
    }

    /// Propagates `seed` into the per-component seed fields.
    pub fn apply_seed(&mut self) {
        self.split.base_seed = self.seed;
        self.walk.seed = self.seed;
        self.gcn.seed = self.seed;
        self.logreg.seed = self.seed;
        if let Some(s) = &mut self.synth {
            s.seed = self.seed;
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.apply_seed();
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        match (&self.data, &self.synth) {
            (Some(_), Some(_)) => return Err("give exactly one of [data] and [synth], not both".into()),
            (None, None) => return Err("give exactly one of [data] and [synth]".into()),
            (None, Some(s)) => s.validate().map_err(|e| e.to_string())?,
            (Some(_), None) => {}
        }
        self.experiment().validate().map_err(|e| e.to_string())
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            methods: self.methods.clone(),
            split: self.split,
            features: self.features,
            walk: self.walk.clone(),
            skipgram: self.skipgram.clone(),
            gcn: self.gcn.clone(),
            logreg: self.logreg,
        }
    }

    /// Canonical JSON of the resolved config.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`Self::canonical_json`], hex encoded.
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
