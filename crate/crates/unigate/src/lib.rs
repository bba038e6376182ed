//! Configuration, file formats, index snapshots and the command bodies of
//! the `unigate` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod matrix;
pub mod output;
pub mod snapshot;

pub use error::{CliError, Result};
