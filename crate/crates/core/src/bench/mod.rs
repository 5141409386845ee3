//! Configuration-driven experiment runs, format comparison and rate fits.

pub mod compare;
pub mod config;
pub mod fit;
pub mod run;

pub use compare::{compare_formats, compare_runs, write_comparison, ComparisonRow};
pub use config::{ExperimentConfig, TensorFormat};
pub use fit::{fit_rate, fit_slope, read_columns};
pub use run::{orthogonalization_cost, run_experiment, IterateStats, RunSummary};
