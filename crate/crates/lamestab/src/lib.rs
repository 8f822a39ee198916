//! File formats, configuration and the experiment runner on top of
//! `lamestab-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod describe;
pub mod io;
pub mod report;
pub mod runner;

pub use config::{CheckName, ExperimentConfig};
pub use describe::{describe, Plan};
pub use report::Report;
pub use runner::run;
