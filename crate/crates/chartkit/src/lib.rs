//! Experiment harness, file formats and command line for `chartcore`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod formats;
pub mod harness;
pub mod parallel;
pub mod svg;

pub use config::{Algorithm, ExperimentConfig};
pub use error::{Result, ToolError};
pub use harness::{evaluate, run_experiment, write_report, EvalReport};
