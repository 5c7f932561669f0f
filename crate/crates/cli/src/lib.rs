//! Command-line front end for `tcsp-core`. Structures and instances are
//! read from a small manifest language and every command prints a JSON
//! report.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod report;

pub use error::{CliError, CliResult};
