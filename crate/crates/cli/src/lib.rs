//! Command-line front end for the `grand-amalgam` library: function file
//! I/O, TOML run configuration, report documents and subcommand dispatch.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use commands::{execute, run, Cli, Command};
pub use error::{CliError, CliResult};
