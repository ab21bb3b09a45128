//! Monte-Carlo experiments: configs, the runner, figure presets, CSV output
//! and the validation suite.

pub mod config;
pub mod output;
pub mod presets;
pub mod runner;
pub mod validate;

pub use config::{
    parse_config, parse_config_str, serialize_config, ExperimentConfig, Measure, RhoDb, Scheme,
    Sweep, SweepParam,
};
pub use output::{write_csv, write_law_histogram, write_trials_csv, CSV_COLUMNS};
pub use presets::{figure_preset, FigureId};
pub use runner::{
    analytic_gap, run_experiment, run_trial, ExperimentResult, LawSamples, PointResult,
    SummaryStats, TrialRecord,
};
pub use validate::{validate, validate_with, CheckResult, ValidateOptions, ValidationReport};
