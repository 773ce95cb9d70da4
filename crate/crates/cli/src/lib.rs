//! Command-line driver for `hardy-core`: configuration, reports, property
//! suites, sweeps and plots.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod plots;
pub mod report;
pub mod sweep;
pub mod verify;

pub use config::RunConfig;
pub use error::{exit, CliError};
