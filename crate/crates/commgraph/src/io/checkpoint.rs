use std::path::Path;

use commgraph_core::gcn::GcnModel;
use commgraph_core::logreg::LogRegModel;
use commgraph_core::methods::MethodKind;
use commgraph_core::DenseMatrix;
use serde::{Deserialize, Serialize};

use super::{read_to_string, write_file};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: u32 = 1;

/// Everything `train` produces for one method, as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: u32,
    pub tool_version: String,
    pub method: MethodKind,
    pub config: PipelineConfig,
    /// Fingerprint of the GCN word vocabulary, when a GCN was trained.
    pub word_vocab_fingerprint: Option<String>,
    /// Fingerprint of the n-gram vocabulary, when an LR model was trained.
    pub ngram_vocab_fingerprint: Option<String>,
    pub gcn: Option<GcnModel>,
    pub logreg: Option<LogRegModel>,
    /// node2vec vectors, one row per node of the graph they were trained on.
    pub node_vectors: Option<DenseMatrix>,
}

pub fn fingerprint_hex(f: u64) -> String {
    format!("{f:016x}")
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    let json = serde_json::to_string(ckpt).expect("checkpoint serializes");
    write_file(path, json)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let c: Checkpoint = serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| Error::parse(path, e.line() as u64, e.to_string()))?;
    if c.format != CHECKPOINT_FORMAT {
        return Err(Error::config(path, format!("unsupported checkpoint format {}", c.format)));
    }
    Ok(c)
}
