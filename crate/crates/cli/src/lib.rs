//! Configuration-driven experiments on top of `qme-core`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod run;
pub mod table;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use run::{run, Command, Outcome};
pub use table::{validate_csv, ResultTable};
