use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::TsrCase;
use crate::linear_models::{FittedLinearModel, Monomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimatorKind {
    Naive,
    RepeatedRegression,
    TwoStep,
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorKind::Naive => "naive",
            EstimatorKind::RepeatedRegression => "rr",
            EstimatorKind::TwoStep => "tsr",
        })
    }
}

/// An estimated curve `x ↦ E[Y | do(X = x)]`, stored as a polynomial in the
/// treatment columns together with the stage models it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalCurve {
    kind: EstimatorKind,
    case: Option<TsrCase>,
    x_columns: Vec<String>,
    terms: Vec<(Monomial, f64)>,
    stage_one: FittedLinearModel,
    stage_two: Vec<FittedLinearModel>,
}

impl CausalCurve {
    pub(crate) fn new(
        kind: EstimatorKind,
        case: Option<TsrCase>,
        x_columns: Vec<String>,
        terms: BTreeMap<Monomial, f64>,
        stage_one: FittedLinearModel,
        stage_two: Vec<FittedLinearModel>,
    ) -> Self {
        CausalCurve {
            kind,
            case,
            x_columns,
            terms: terms.into_iter().collect(),
            stage_one,
            stage_two,
        }
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn case(&self) -> Option<TsrCase> {
        self.case
    }

    pub fn x_columns(&self) -> &[String] {
        &self.x_columns
    }

    /// Polynomial terms over the treatment columns, sorted by monomial.
    pub fn terms(&self) -> &[(Monomial, f64)] {
        &self.terms
    }

    pub fn stage_one(&self) -> &FittedLinearModel {
        &self.stage_one
    }

    pub fn stage_two(&self) -> &[FittedLinearModel] {
        &self.stage_two
    }

    /// Value at a treatment vector (one entry per treatment column).
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.x_columns.len(), "treatment arity");
        self.terms.iter().map(|(m, c)| c * m.eval(x)).sum()
    }

    /// Value at a scalar treatment.
    pub fn at(&self, x: f64) -> f64 {
        self.evaluate(&[x])
    }

    pub fn evaluate_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.at(x)).collect()
    }
}

impl fmt::Display for CausalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let body = if m.is_intercept() {
                format!("{:.6}", c.abs())
            } else {
                let name = m
                    .factors()
                    .iter()
                    .map(|&(col, e)| {
                        let n = &self.x_columns[col];
                        if e == 1 { n.clone() } else { format!("{n}^{e}") }
                    })
                    .collect::<Vec<_>>()
                    .join("*");
                format!("{:.6}*{name}", c.abs())
            };
            let sign = match (i, *c < 0.0) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            write!(f, "{sign}{body}")?;
        }
        Ok(())
    }
}

/// Mean squared difference between `curve` and `truth` over `x_points`.
pub fn evaluate_mse(curve: &CausalCurve, x_points: &[f64], truth: impl Fn(f64) -> f64) -> Result<f64> {
    if x_points.is_empty() {
        return Err(Error::InvalidArgument("no evaluation points".into()));
    }
    if curve.x_columns.len() != 1 {
        return Err(Error::InvalidArgument(
            "mean squared error needs a single treatment column".into(),
        ));
    }
    let sse: f64 = x_points
        .iter()
        .map(|&x| (curve.at(x) - truth(x)).powi(2))
        .sum();
    Ok(sse / x_points.len() as f64)
}
