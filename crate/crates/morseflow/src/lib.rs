//! File formats, parallel sweeps and the command-line front end for
//! `morseflow-core`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod formats;
pub mod graph_file;
pub mod init;
pub mod manifest;
pub mod parallel;
pub mod reports;

pub use error::{CliError, Result};
