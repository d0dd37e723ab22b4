//! Evaluation protocol: repeated stratified splits, per-class and macro
//! metrics, paired significance tests and table rendering.

mod experiment;
mod metrics;
mod report;
mod split;
mod stats;

pub use experiment::*;
pub use metrics::*;
pub use report::*;
pub use split::*;
pub use stats::*;
