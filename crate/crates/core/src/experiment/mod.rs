//! Experiment driver: configuration parsing, presets, and the five
//! experiment runners with their plot-ready outputs.

mod config;
mod run;

pub use config::{validate_config, validate_config_with, ExperimentConfig, ExperimentId, Overrides, Preset};
pub use run::{run_experiment, DivergenceRow, KsRow, ManifestEntry, RunOutput, MANIFEST_FILE};
