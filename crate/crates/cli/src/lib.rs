//! Library behind the `avwc` command-line tool: channel files, run
//! configuration, and the `analyze`, `capacity` and `simulate` commands.

pub mod args;
pub mod commands;
pub mod config;
mod error;
pub mod spec;

pub use commands::{cmd_analyze, cmd_capacity, cmd_simulate, run, run_on, Output};
pub use config::{CapacityArgs, Command, PrefixKind, RunConfig, SimulateArgs};
pub use error::CliError;
pub use spec::{load_channel, parse_channel_file, ChannelSpecFile, SpecError};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
