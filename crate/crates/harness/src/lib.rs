//! Experiment harness for the `jasa` solvers: JSON configs, single-instance
//! runs, Monte-Carlo sweeps with CSV output and an oracle-equivalence suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod mode;
pub mod solve;
pub mod sweep;
pub mod validate;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use mode::Mode;
pub use solve::{solve, Outcome};
pub use sweep::{run_sweep, write_csv, SweepRow, SweepSpec, SweepVar, CSV_HEADER};
