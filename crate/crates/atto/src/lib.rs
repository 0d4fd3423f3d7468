//! File formats, configuration and command implementations for the `atto`
//! binary. The numerics live in `atto-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod sampling;
pub mod selftest;

pub use config::JobConfig;
pub use error::CliError;
