//! Closed-form least squares and ridge regression over polynomial feature maps.

mod cv;
mod features;
mod regression;

pub use cv::{
    cross_validate_lambda, default_lambda_grid, fit_ridge_cv, fit_stage, fold_assignment,
    DEFAULT_FOLDS,
};
pub use features::{expand_features, DesignMatrix, FeatureMap, Monomial};
pub use regression::{fit_ols, fit_ridge, predict, FittedLinearModel, RANK_TOLERANCE};
