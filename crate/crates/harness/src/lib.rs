//! Command-line harness around `gsdeconv`: phase-transition sweeps,
//! certificate reports and the ratings source-localization pipeline.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod cli;
pub mod error;
pub mod localization;
pub mod matrix_io;
pub mod ratings;
pub mod sweep;

pub use error::{HarnessError, Result};
