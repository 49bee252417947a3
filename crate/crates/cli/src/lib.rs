//! Library side of the `gifc` command-line tool: configuration, the
//! subcommand runners and result writers.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

pub use commands::{execute, run, Outcome};
pub use config::{parse_config, parse_config_in, Command, ExperimentConfig, Format, Overrides};
pub use error::CliError;
pub use sweep::{run_sweep, SweepResult};

/// Version of the command-line interface and file formats.
pub const INTERFACE_VERSION: &str = "1";
