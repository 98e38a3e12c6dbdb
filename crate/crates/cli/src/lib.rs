//! Batch front end for channel distortion analysis: scenario files in, CSV and JSON out.

pub mod commands;
mod error;
pub mod output;
pub mod scenario;

pub use commands::{RouteChoice, RunOptions};
pub use error::{CliError, Result};
pub use scenario::Scenario;
