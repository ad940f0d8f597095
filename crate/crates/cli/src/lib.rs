//! Command-line front end: argument types, dispatch, and the sequence file
//! formats.

mod commands;
pub mod seqfile;

pub use commands::{format_value, run, Cli, CliError, Command};
