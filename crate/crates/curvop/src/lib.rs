//! File formats, stable JSON, parallel drivers and report rendering for the
//! `curvop` command line. The mathematics lives in `curvop-core`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod files;
pub mod json;

pub use error::{CliError, CliResult};
