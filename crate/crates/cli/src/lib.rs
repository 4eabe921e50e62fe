//! File formats and command implementations behind the `chaindist` binary.

pub mod app;
pub mod config;
pub mod document;
pub mod error;
pub mod report;

pub use error::CliError;
