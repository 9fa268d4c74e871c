//! Experiment configuration, seeded execution, aggregation and output.

pub mod config;
pub mod csv_io;
pub mod experiment;
pub mod plot;
pub mod summary;
pub mod verify;

pub use config::{lambda_rule, mu_rule, ExperimentConfig, ParamRule};
pub use csv_io::{emit_csv, read_records, read_summary, write_records, write_summary, CsvRow};
pub use experiment::{cell_id, run_experiment, run_experiment_with, Execution, RunRecord};
pub use plot::{emit_plot, render_svg};
pub use summary::{quantile, summarize, SummaryRow};
pub use verify::{verify, verify_with, CheckResult, Faults, VerifyLevel, VerifyReport};
