//! Batch front end: JSON configuration in, CSV series and JSON summaries out.
//!
//! Exit codes: `0` success, `1` computational or gate failure, `2` usage or
//! configuration error.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, RunConfig};
pub use error::CliError;
