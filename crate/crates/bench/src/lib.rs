//! Experiment runner for the split transport solvers: forward error tables,
//! spatial convergence ladders and inverse-design runs, driven by flat
//! `key = value` config files.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod presets;
pub mod table;

pub use config::{ErrorMetric, ExperimentConfig, ExperimentKind, Strategy};
pub use error::{BenchError, ConfigError, Issue, Result};
pub use experiments::{convergence_rows, run, run_convergence, run_forward_error, run_inverse, with_threads};
pub use output::emit_outputs;
pub use table::{Experiment, ResultRow, Value};
