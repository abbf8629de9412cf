//! Command-line driver for the `conecut` experiments.

pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_args, RunConfig};
pub use run::{run, RunError};
