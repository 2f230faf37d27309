//! Config-driven experiment runner for the `typgraph` library.

pub mod config;
pub mod experiments;
pub mod instances;
pub mod report;

pub use config::{ConfigError, Diagnostic, ExperimentConfig, ExperimentKind, Severity};
pub use experiments::{run, RunError, CSV_COLUMNS_HELP};
pub use report::{Cell, CsvReport};
