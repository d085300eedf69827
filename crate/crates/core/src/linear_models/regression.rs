use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::features::{expand_features, DesignMatrix, FeatureMap};
use crate::error::{Error, Result};

/// Pivots below this fraction of the largest pivot mark the design singular.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Intercept plus coefficients over an explicit feature map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedLinearModel {
    feature_map: FeatureMap,
    coefficients: Vec<f64>,
    ridge_lambda: Option<f64>,
    /// `(mean, scale)` per feature, recorded at fit time. `(0, 1)` is identity.
    standardization: Vec<(f64, f64)>,
}

impl FittedLinearModel {
    /// Builds a model from known coefficients; standardization is identity.
    pub fn from_coefficients(feature_map: FeatureMap, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != feature_map.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} terms",
                coefficients.len(),
                feature_map.len()
            )));
        }
        let standardization = vec![(0.0, 1.0); feature_map.len()];
        Ok(FittedLinearModel {
            feature_map,
            coefficients,
            ridge_lambda: None,
            standardization,
        })
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.feature_map
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn ridge_lambda(&self) -> Option<f64> {
        self.ridge_lambda
    }

    pub fn standardization(&self) -> &[(f64, f64)] {
        &self.standardization
    }

    /// L2 norm of the non-intercept coefficients on the standardized scale.
    pub fn standardized_norm(&self) -> f64 {
        self.coefficients
            .iter()
            .zip(&self.standardization)
            .skip(1)
            .map(|(b, (_, s))| (b * s).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn predict_row(&self, input: &[f64]) -> f64 {
        self.feature_map
            .terms()
            .iter()
            .zip(&self.coefficients)
            .map(|(t, b)| b * t.eval(input))
            .sum()
    }
}

/// Least-squares solution of `a x = b` by column-pivoted QR.
fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let (n, p) = a.shape();
    if n < p {
        return Err(Error::InsufficientRows { rows: n, features: p });
    }
    if p == 0 {
        return Ok(DVector::zeros(0));
    }
    let qr = a.clone().col_piv_qr();
    let r = qr.r();
    let largest = r[(0, 0)].abs();
    for k in 0..p {
        let pivot = r[(k, k)].abs();
        if largest == 0.0 || pivot < RANK_TOLERANCE * largest {
            return Err(Error::SingularDesign {
                pivot: if largest == 0.0 { 0.0 } else { pivot / largest },
            });
        }
    }
    let q = qr.q();
    let qtb = q.transpose() * b;
    let mut z = r
        .solve_upper_triangular(&qtb)
        .ok_or(Error::SingularDesign { pivot: 0.0 })?;
    qr.p().inv_permute_rows(&mut z);
    Ok(z)
}

pub fn fit_ols(design: &DesignMatrix, fmap: &FeatureMap) -> Result<FittedLinearModel> {
    check_shape(design, fmap)?;
    let y = design.response().ok_or(Error::MissingResponse)?;
    let beta = lstsq(design.rows(), y)?;
    FittedLinearModel::from_coefficients(fmap.clone(), beta.iter().copied().collect())
}

/// Ridge fit that leaves the intercept unpenalized and standardizes every other
/// feature to zero mean and unit variance before applying the penalty.
pub fn fit_ridge(design: &DesignMatrix, fmap: &FeatureMap, lambda: f64) -> Result<FittedLinearModel> {
    check_shape(design, fmap)?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("ridge lambda must be >= 0, got {lambda}")));
    }
    let y = design.response().ok_or(Error::MissingResponse)?;
    let x = design.rows();
    let (n, p) = x.shape();
    let q = p - 1;
    let nf = n as f64;

    let y_mean = y.mean();
    let mut standardization = vec![(0.0, 1.0); p];
    for j in 1..p {
        let col = x.column(j);
        let mean = col.mean();
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
        let sd = var.sqrt();
        if sd <= f64::EPSILON * mean.abs().max(1.0) {
            if lambda > 0.0 {
                return Err(Error::DegenerateFeature { feature: j });
            }
            return Err(Error::SingularDesign { pivot: 0.0 });
        }
        standardization[j] = (mean, sd);
    }

    let mut coefficients = vec![0.0; p];
    if q > 0 {
        let extra = if lambda > 0.0 { q } else { 0 };
        let mut a = DMatrix::zeros(n + extra, q);
        for j in 0..q {
            let (m, s) = standardization[j + 1];
            for i in 0..n {
                a[(i, j)] = (x[(i, j + 1)] - m) / s;
            }
        }
        let root = lambda.sqrt();
        for j in 0..extra {
            a[(n + j, j)] = root;
        }
        let mut b = DVector::zeros(n + extra);
        for i in 0..n {
            b[i] = y[i] - y_mean;
        }
        let std_beta = lstsq(&a, &b)?;
        for j in 0..q {
            coefficients[j + 1] = std_beta[j] / standardization[j + 1].1;
        }
    }
    coefficients[0] = y_mean
        - (1..p)
            .map(|j| coefficients[j] * standardization[j].0)
            .sum::<f64>();

    Ok(FittedLinearModel {
        feature_map: fmap.clone(),
        coefficients,
        ridge_lambda: Some(lambda),
        standardization,
    })
}

pub fn predict(model: &FittedLinearModel, data: &DMatrix<f64>) -> Result<DVector<f64>> {
    let design = expand_features(&model.feature_map, data)?;
    Ok(design.rows() * DVector::from_column_slice(&model.coefficients))
}

fn check_shape(design: &DesignMatrix, fmap: &FeatureMap) -> Result<()> {
    if design.ncols() != fmap.len() {
        return Err(Error::InvalidArgument(format!(
            "design has {} columns but the feature map has {} terms",
            design.ncols(),
            fmap.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn line_data(xs: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
        let data = DMatrix::from_column_slice(xs.len(), 1, xs);
        let y = DVector::from_iterator(xs.len(), xs.iter().map(|x| 2.0 * x + 1.0));
        (data, y)
    }

    fn design(fmap: &FeatureMap, data: &DMatrix<f64>, y: DVector<f64>) -> DesignMatrix {
        expand_features(fmap, data).unwrap().with_response(y).unwrap()
    }

    #[test]
    fn ols_interpolates_exact_line() {
        let fmap = FeatureMap::polynomial(&[0], 1).unwrap();
        for xs in [&[0.0, 1.0][..], &[-3.0, 0.5, 2.0, 7.0, 11.0][..]] {
            let (data, y) = line_data(xs);
            let m = fit_ols(&design(&fmap, &data, y), &fmap).unwrap();
            assert_abs_diff_eq!(m.coefficients()[0], 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(m.coefficients()[1], 2.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn intercept_only_gives_mean() {
        let fmap = FeatureMap::intercept_only();
        let data = DMatrix::zeros(4, 0);
        let y = DVector::from_element(4, 3.25);
        let m = fit_ols(&design(&fmap, &data, y), &fmap).unwrap();
        assert_abs_diff_eq!(m.intercept(), 3.25, epsilon = 1e-12);
    }

    #[test]
    fn rank_deficient_design_is_singular() {
        // second column duplicates the first
        let fmap = FeatureMap::polynomial(&[0, 1], 1).unwrap();
        let data = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 5.0]);
        assert!(matches!(
            fit_ols(&design(&fmap, &data, y), &fmap),
            Err(Error::SingularDesign { .. })
        ));
    }

    #[test]
    fn too_few_rows() {
        let fmap = FeatureMap::polynomial(&[0], 2).unwrap();
        let (data, y) = line_data(&[1.0, 2.0]);
        assert!(matches!(
            fit_ols(&design(&fmap, &data, y), &fmap),
            Err(Error::InsufficientRows { rows: 2, features: 3 })
        ));
    }

    #[test]
    fn ridge_zero_matches_ols() {
        let fmap = FeatureMap::polynomial(&[0], 1).unwrap();
        let (data, y) = line_data(&[-1.0, 0.0, 2.0, 4.0, 9.0]);
        let d = design(&fmap, &data, y);
        let ols = fit_ols(&d, &fmap).unwrap();
        let ridge = fit_ridge(&d, &fmap, 0.0).unwrap();
        for (a, b) in ols.coefficients().iter().zip(ridge.coefficients()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
        assert!(ols.ridge_lambda().is_none());
        assert!(ols.standardization().iter().all(|&s| s == (0.0, 1.0)));
    }

    #[test]
    fn ridge_huge_penalty_shrinks_to_mean() {
        let fmap = FeatureMap::polynomial(&[0], 1).unwrap();
        let xs: Vec<f64> = (-5..=5).map(f64::from).collect();
        let (data, y) = line_data(&xs);
        let y_mean = y.mean();
        let m = fit_ridge(&design(&fmap, &data, y), &fmap, 1e6).unwrap();
        assert_abs_diff_eq!(m.coefficients()[1], 0.0, epsilon = 1e-3);
        assert_abs_diff_eq!(m.intercept(), y_mean, epsilon = 1e-6);
    }

    #[test]
    fn ridge_rejects_constant_feature() {
        let fmap = FeatureMap::polynomial(&[0], 1).unwrap();
        let data = DMatrix::from_element(5, 1, 2.0);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(matches!(
            fit_ridge(&design(&fmap, &data, y), &fmap, 1.0),
            Err(Error::DegenerateFeature { feature: 1 })
        ));
    }

    #[test]
    fn predict_known_model() {
        let fmap = FeatureMap::polynomial(&[0], 1).unwrap();
        let m = FittedLinearModel::from_coefficients(fmap, vec![1.0, 2.0]).unwrap();
        let p = predict(&m, &DMatrix::from_column_slice(1, 1, &[0.0])).unwrap();
        assert_eq!(p[0], 1.0);
        let p = predict(&m, &DMatrix::from_column_slice(2, 1, &[1.0, 2.0])).unwrap();
        assert_eq!(p.as_slice(), &[3.0, 5.0]);
        assert!(matches!(
            predict(&m, &DMatrix::zeros(2, 0)),
            Err(Error::MissingColumn { .. })
        ));
    }
}
