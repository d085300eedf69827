//! Recovering `E[Y | do(X)]` from selection-biased data with proxy variables
//! and external, unbiased observations of the treatment and proxies.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod graph;
pub mod linear_models;
pub mod scm;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
