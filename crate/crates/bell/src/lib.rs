//! File formats, configuration and the `bell` command-line front end for
//! [`bell_core`].

pub mod angles;
pub mod cli;
pub mod config;
mod error;
pub mod json;
pub mod output;
pub mod trials;

pub use error::CliError;

/// Version string echoed in every JSON document.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
