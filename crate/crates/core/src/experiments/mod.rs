//! Replication studies: repeated fits over fresh samples, error summaries and
//! pointwise bands.
mod config;
mod report;
mod run;

pub use config::{EstimatorName, ExperimentConfig};
pub use report::{band_csv, emit_report, fmt_sig6, runs_csv, summary_csv};
pub use run::{
    collect_experiment, compute_band, fit_named, run_experiment, BandReport, CellBand, CellSummary,
    ExperimentReport, RunOutcome, Truth,
};
