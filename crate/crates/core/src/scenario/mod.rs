//! Configuration, named presets, regime labels and the run driver.

pub mod classify;
pub mod config;
pub mod presets;
pub mod run;

pub use classify::{regime_classifier, ClassifierConfig, RegimeReport, RegimeTag};
pub use config::{parse_config, InitialState, RunConfig};
pub use presets::{list_presets, preset, ScenarioPreset};
pub use run::{
    parse_series_csv, run_batch, run_scenario, series_csv, simulate, RunOptions, RunSummary,
};
