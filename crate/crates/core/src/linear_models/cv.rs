use rand::seq::SliceRandom;

use super::features::{DesignMatrix, FeatureMap};
use super::regression::{fit_ols, fit_ridge, FittedLinearModel};
use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_FOLDS: usize = 5;

/// `10^-2, 10^-1.9, ..., 10^2`: 41 points.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=40).map(|k| 10f64.powf(-2.0 + 0.1 * k as f64)).collect()
}

/// Seeded fold label for every row; fold sizes differ by at most one.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let mut label = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        label[row] = pos % folds;
    }
    label
}

/// Picks the grid value with the smallest pooled held-out squared error.
///
/// Ties go to the smaller lambda. A grid point whose fit fails on any fold
/// (e.g. lambda = 0 on a rank-deficient fold) scores `+inf`.
pub fn cross_validate_lambda(
    design: &DesignMatrix,
    fmap: &FeatureMap,
    grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("lambda grid is empty".into()));
    }
    if folds < 2 {
        return Err(Error::InvalidArgument("cross-validation needs at least 2 folds".into()));
    }
    let n = design.nrows();
    if n < folds {
        return Err(Error::InsufficientRows { rows: n, features: folds });
    }
    if let Some(bad) = grid.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid lambda {bad} in grid")));
    }
    design.response().ok_or(Error::MissingResponse)?;
    let labels = fold_assignment(n, folds, seed);
    let splits: Vec<(DesignMatrix, DesignMatrix)> = (0..folds)
        .map(|f| {
            let train: Vec<usize> = (0..n).filter(|&i| labels[i] != f).collect();
            let test: Vec<usize> = (0..n).filter(|&i| labels[i] == f).collect();
            (design.select_rows(&train), design.select_rows(&test))
        })
        .collect();

    let mut sorted: Vec<f64> = grid.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut best = (f64::INFINITY, sorted[0]);
    for &lambda in &sorted {
        let mut sse = 0.0;
        for (train, test) in &splits {
            match fit_ridge(train, fmap, lambda) {
                Ok(m) => {
                    let pred = test.rows() * nalgebra::DVector::from_column_slice(m.coefficients());
                    let resid = test.response().unwrap() - pred;
                    sse += resid.norm_squared();
                }
                Err(_) => {
                    sse = f64::INFINITY;
                    break;
                }
            }
        }
        let score = sse / n as f64;
        if score < best.0 {
            best = (score, lambda);
        }
    }
    Ok(best.1)
}

/// Chooses lambda by cross-validation, then refits on all rows.
pub fn fit_ridge_cv(
    design: &DesignMatrix,
    fmap: &FeatureMap,
    grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<FittedLinearModel> {
    let lambda = cross_validate_lambda(design, fmap, grid, folds, seed)?;
    fit_ridge(design, fmap, lambda)
}

/// OLS or CV-tuned ridge, by flag.
pub fn fit_stage(
    design: &DesignMatrix,
    fmap: &FeatureMap,
    ridge: Option<(&[f64], usize, u64)>,
) -> Result<FittedLinearModel> {
    match ridge {
        None => fit_ols(design, fmap),
        Some((grid, folds, seed)) => fit_ridge_cv(design, fmap, grid, folds, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_models::expand_features;
    use nalgebra::{DMatrix, DVector};
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn default_grid_is_41_decade_tenths() {
        let g = default_lambda_grid();
        assert_eq!(g.len(), 41);
        assert!((g[0] - 0.01).abs() < 1e-15);
        assert!((g[40] - 100.0).abs() < 1e-10);
        assert!((g[10] - 0.1).abs() < 1e-14);
        for w in g.windows(2) {
            assert!((w[1] / w[0] - 10f64.powf(0.1)).abs() < 1e-12);
        }
    }

    #[test]
    fn folds_are_balanced_and_deterministic() {
        let a = fold_assignment(23, 5, 11);
        assert_eq!(a, fold_assignment(23, 5, 11));
        for f in 0..5 {
            let c = a.iter().filter(|&&l| l == f).count();
            assert!(c == 4 || c == 5);
        }
    }

    #[test]
    fn exact_linear_response_prefers_small_lambda() {
        let fmap = FeatureMap::polynomial(&[0], 1).unwrap();
        let xs: Vec<f64> = (0..40).map(|i| i as f64 * 0.25 - 5.0).collect();
        let data = DMatrix::from_column_slice(xs.len(), 1, &xs);
        let y = DVector::from_iterator(xs.len(), xs.iter().map(|x| 4.0 * x - 1.0));
        let d = expand_features(&fmap, &data).unwrap().with_response(y).unwrap();
        assert_eq!(cross_validate_lambda(&d, &fmap, &[0.01, 100.0], 5, 3).unwrap(), 0.01);
    }

    #[test]
    fn pure_noise_prefers_large_lambda_most_of_the_time() {
        let fmap = FeatureMap::polynomial(&[0, 1, 2], 1).unwrap();
        let mut wins = 0;
        let reps = 40;
        for r in 0..reps {
            let mut rng = seed::rng(1000 + r);
            let n = 30;
            let data = DMatrix::from_fn(n, 3, |_, _| StandardNormal.sample(&mut rng));
            let y = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            let d = expand_features(&fmap, &data).unwrap().with_response(y).unwrap();
            if cross_validate_lambda(&d, &fmap, &[0.01, 100.0], 5, r).unwrap() == 100.0 {
                wins += 1;
            }
        }
        assert!(wins * 2 > reps, "large lambda chosen {wins}/{reps}");
    }

    #[test]
    fn zero_lambda_on_rank_deficient_folds_scores_infinite() {
        // 6 rows, 5 features: every training fold has fewer rows than features.
        let fmap = FeatureMap::polynomial(&[0, 1, 2, 3], 1).unwrap();
        let mut rng = seed::rng(5);
        let data = DMatrix::from_fn(6, 4, |_, _| StandardNormal.sample(&mut rng));
        let y = DVector::from_fn(6, |_, _| StandardNormal.sample(&mut rng));
        let d = expand_features(&fmap, &data).unwrap().with_response(y).unwrap();
        assert_eq!(cross_validate_lambda(&d, &fmap, &[0.0, 1.0], 3, 1).unwrap(), 1.0);
    }

    #[test]
    fn argument_errors() {
        let fmap = FeatureMap::polynomial(&[0], 1).unwrap();
        let data = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let d = expand_features(&fmap, &data)
            .unwrap()
            .with_response(DVector::from_vec(vec![1.0, 2.0, 3.0]))
            .unwrap();
        assert!(cross_validate_lambda(&d, &fmap, &[], 2, 0).is_err());
        assert!(cross_validate_lambda(&d, &fmap, &[1.0], 1, 0).is_err());
        assert!(cross_validate_lambda(&d, &fmap, &[1.0], 4, 0).is_err());
    }
}
