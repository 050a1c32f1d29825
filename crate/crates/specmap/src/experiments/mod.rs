//! Scripted, seeded experiment pipelines emitting tabular results.

mod config;
mod runs;
mod table;

pub use config::{config_hash, ConfigSnapshot, ExperimentConfig, GraphSource, PartialityKind};
pub use runs::{run_matching_eval, run_rewiring_robustness, run_transfer_sweep, ExperimentOutput};
pub use table::{median, ResultRow, ResultTable};
