//! Polynomial features, OLS and cross-validated ridge on a small noisy sample.
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use proxicause::linear_models::{cross_validate_lambda, default_lambda_grid, expand_features, fit_ols, fit_ridge, FeatureMap};
use proxicause::seed;

fn main() -> proxicause::Result<()> {
    let mut rng = seed::rng(3);
    let n = 60;
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let y: Vec<f64> = x.iter().map(|x| 1.0 + 0.5 * x - x * x + rng.sample::<f64, _>(StandardNormal)).collect();

    let fmap = FeatureMap::polynomial(&[0], 6)?;
    let design = expand_features(&fmap, &DMatrix::from_column_slice(n, 1, &x))?.with_response(DVector::from_vec(y))?;

    let ols = fit_ols(&design, &fmap)?;
    let lambda = cross_validate_lambda(&design, &fmap, &default_lambda_grid(), 5, 11)?;
    let ridge = fit_ridge(&design, &fmap, lambda)?;
    println!("features: {}", fmap.terms().iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", "));
    println!("cv lambda = {lambda:.4}");
    println!("standardized norm: ols {:.3}, ridge {:.3}", ols.standardized_norm(), ridge.standardized_norm());
    for v in [-1.5, 0.0, 1.5] {
        let truth = 1.0 + 0.5 * v - v * v;
        println!("x = {v:4}: truth {truth:6.3}  ols {:6.3}  ridge {:6.3}", ols.predict_row(&[v]), ridge.predict_row(&[v]));
    }
    Ok(())
}
