//! Declarative scenarios: TOML configs, end-to-end runs, CSV/JSON outputs
//! and directory sweeps.

pub mod config;
pub mod expr;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{load_config, parse_config, ScenarioConfig};
pub use output::{emit_outputs, render_csv, CSV_HEADER};
pub use run::{error_exit_code, exit, run_scenario, static_check, RunOptions, RunReport};
pub use sweep::{run_sweep, SweepSummary};
