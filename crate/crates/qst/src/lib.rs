//! Scenario runner behind the `qst` command-line tool.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{
    parse_config, parse_config_with, serialize_config, KernelChoice, Mode, ScenarioConfig,
};
pub use error::CliError;
pub use output::{emit_csv, emit_summary, format_value, sidecar_path, write_csv};
pub use run::{run_scenario, ResultTable, RunOutput, Summary};
