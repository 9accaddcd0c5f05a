//! Batch front door for the Triple Helix field toolkit: TOML-configured
//! simulation runs, CSV/DOT/JSON emission with a manifest per run, and the
//! run-and-compare harnesses.

pub mod config;
pub mod error;
pub mod harness;
pub mod init;
pub mod output;
pub mod runner;

pub use error::CliError;
