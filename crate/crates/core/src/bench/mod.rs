//! Experiment harness: JSON configurations, grid execution and CSV output.

mod config;
mod run;
mod trace_csv;

pub use config::{parse_config, parse_config_str, ConfigError, ExperimentConfig, Family, ProblemSpec, SolverSpec};
pub use run::{build_problem, list_problems, run_experiment, BenchError, CellReport, ExperimentReport, SUMMARY_HEADER};
pub use trace_csv::{read_trace, write_trace, TRACE_HEADER};
