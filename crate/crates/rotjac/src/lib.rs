//! Command-line front end, file formats and verification tooling built on
//! [`rotjac_core`].
//!
//! The binary is a thin wrapper around [`cli::run`]; everything it prints is
//! produced by the modules below so it can be exercised from tests without
//! spawning a process.

pub mod bench;
pub mod check;
pub mod cli;
pub mod error;
pub mod output;
mod parallel;
pub mod schema;

pub use error::CliError;
