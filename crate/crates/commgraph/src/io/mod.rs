//! On-disk formats: corpora, edge lists, graph and vocabulary dumps,
//! embedding and prediction tables, model checkpoints.

mod checkpoint;
mod corpus;
mod edges;
mod graph;
mod tables;
mod vocab;

pub use checkpoint::*;
pub use corpus::*;
pub use edges::*;
pub use graph::*;
pub use tables::*;
pub use vocab::*;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}
