//! Naive, repeated-regression and two-step regression curve estimators.

mod curve;
mod dataset;
mod fit;

pub use curve::{evaluate_mse, CausalCurve, EstimatorKind};
pub use dataset::{Column, LabeledDataset, Provenance, Role};
pub use fit::{fit_naive, fit_rr, fit_tsr, rr_closed_form, StageConfig};
