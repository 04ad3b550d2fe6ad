//! Run configuration files and output writers.

pub(crate) mod config;
mod output;

pub use config::{load_config, parse_config, RunConfig};
pub use output::{
    parse_trajectory_csv, profile_csv, profile_reconstruction, reports_json, save_outputs,
    state_csv, trajectory_csv, write_atomic, OutputPaths, TrajectoryRow,
};
