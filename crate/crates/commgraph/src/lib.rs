//! File formats, configuration and experiment pipelines around
//! `commgraph-core`, plus the `commgraph` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use config::PipelineConfig;
pub use error::{Error, Result};
