//! Command implementations behind the `decoyvis` binary.

pub mod commands;
pub mod config;
mod error;

pub use error::{CliError, ErrorKind};
