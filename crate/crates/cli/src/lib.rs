//! Command implementations behind the `graphtrl` binary.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod stats;

pub use config::RunConfig;
pub use error::CliError;
