//! Experiment harness: configuration, deterministic seeding, Monte-Carlo
//! runners, CSV emission, and the `onebit` CLI plumbing.
//!
//! Reproducibility contract: every trial runs on a stream derived from
//! `(master_seed, experiment, cell, trial)`, aggregation is a sequential fold
//! over the trial vector in index order, and floats are printed with 17
//! significant digits — so output bytes are independent of thread count.

// `!(x > 0)` deliberately rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod csvio;
pub mod error;
pub mod experiments;
pub mod files;
pub mod metrics;
pub mod seed;

pub use config::{DecoderKind, DeviationKind, ExperimentConfig, ExperimentId};
pub use error::{exit_code, HarnessError, Result};
pub use seed::derive_trial_seed;
