//! Problem and report file formats plus the command implementations behind
//! the `choquet` binary.

pub mod commands;
pub mod error;
pub mod problem;
pub mod report;

pub use error::{CliError, CliResult};
