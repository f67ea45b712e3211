//! Monte Carlo driver: experiment configuration, trial runs, empirical
//! statistics, report files and the `verify` self-checks.

pub mod config;
pub mod report;
pub mod run;
pub mod stats;
pub mod verify;

pub use config::{ExperimentConfig, Reference, RhsMode, Statistic};
pub use report::{emit_report, summarize, write_trials_csv, HaltingCsvRow, ReportPaths, Summary};
pub use run::{run_experiment, run_trial, TrialRow, TrialTable};
pub use stats::{empirical_cdf, histogram, ks_distance, Cdf, EmpiricalDistribution, Histogram};
pub use verify::{run_suite, Check, Suite, VerifyReport};
