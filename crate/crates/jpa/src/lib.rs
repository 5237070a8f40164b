//! File formats, sweeps and figure generation on top of `jpa-core`.

pub mod check;
pub mod config;
pub mod error;
pub mod figures;
pub mod histfile;
pub mod sweep;
pub mod synth;
pub mod table;

pub use error::{CliError, CliResult};
