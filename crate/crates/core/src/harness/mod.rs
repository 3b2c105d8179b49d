//! Experiment orchestration: performance gap, start sampling, multi-start
//! runs of SO-MOGSA and Nelder-Mead, trace and report files, and figures.

mod config;
mod experiment;
mod metric;
mod starts;
mod trace_csv;

pub use config::{Algorithm, ExperimentConfig, StartSpec};
pub use experiment::{execute, run_algorithm, run_experiment, trace_file_name, ExperimentRun, RunReport, RunRow};
pub use metric::{performance_gap, Gap};
pub use starts::sample_starts;
pub use trace_csv::{read_trace_csv, trace_csv_bytes, write_trace_csv, TraceRow};
