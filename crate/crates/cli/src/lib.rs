//! Universe files, command dispatch and reports for the `segal-dyn` tool.

pub mod commands;
pub mod error;
pub mod report;
pub mod resolve;
pub mod universe;

pub use commands::{run, Command, GencatOp, StringsOp};
pub use error::CliError;
pub use report::{Format, Report};
pub use universe::UniverseFile;
