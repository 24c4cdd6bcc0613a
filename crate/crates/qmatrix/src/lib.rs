//! File formats, reports and the `qmat` front end over `qmatrix-core`.

pub mod commands;
pub mod error;
pub mod io;
pub mod report;

pub use error::{CliError, Result};
