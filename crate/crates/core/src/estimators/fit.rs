use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::curve::{CausalCurve, EstimatorKind};
use super::dataset::{LabeledDataset, Provenance, Role};
use crate::error::{Error, Result};
use crate::graph::TsrCase;
use crate::linear_models::{
    default_lambda_grid, expand_features, fit_stage, predict, FeatureMap, FittedLinearModel,
    Monomial, DEFAULT_FOLDS,
};
use crate::seed;

/// Feature maps and penalization for the two regression stages.
///
/// `stage_one_map` indexes the columns `[X.., Z+.., Z-..]` of the selected
/// data; `stage_two_map` indexes `[X.., Z+..]` of the external data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageConfig {
    pub stage_one_map: FeatureMap,
    pub stage_two_map: FeatureMap,
    pub ridge_stage_one: bool,
    pub ridge_stage_two: bool,
    pub cv_grid: Vec<f64>,
    pub cv_folds: usize,
    pub cv_seed: u64,
}

impl StageConfig {
    pub fn ols(stage_one_map: FeatureMap, stage_two_map: FeatureMap) -> Self {
        StageConfig {
            stage_one_map,
            stage_two_map,
            ridge_stage_one: false,
            ridge_stage_two: false,
            cv_grid: default_lambda_grid(),
            cv_folds: DEFAULT_FOLDS,
            cv_seed: 0,
        }
    }

    pub fn with_ridge(mut self, stage_one: bool, stage_two: bool) -> Self {
        self.ridge_stage_one = stage_one;
        self.ridge_stage_two = stage_two;
        self
    }

    pub fn with_cv_seed(mut self, seed: u64) -> Self {
        self.cv_seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if (self.ridge_stage_one || self.ridge_stage_two) && self.cv_grid.is_empty() {
            return Err(Error::InvalidArgument("ridge requested with an empty lambda grid".into()));
        }
        Ok(())
    }

    fn ridge(&self, stage_two: bool, stream: u64) -> Option<(&[f64], usize, u64)> {
        let on = if stage_two { self.ridge_stage_two } else { self.ridge_stage_one };
        on.then(|| {
            (
                self.cv_grid.as_slice(),
                self.cv_folds,
                seed::derive(self.cv_seed, stream, seed::tag::CV),
            )
        })
    }
}

/// Column names of the selected data split by role.
struct Layout {
    x: Vec<String>,
    zplus: Vec<String>,
    zminus: Vec<String>,
}

impl Layout {
    fn of(s: &LabeledDataset) -> Result<Self> {
        let own = |r| s.names_with_role(r).into_iter().map(String::from).collect::<Vec<_>>();
        let layout = Layout {
            x: own(Role::X),
            zplus: own(Role::Zplus),
            zminus: own(Role::Zminus),
        };
        if layout.x.is_empty() {
            return Err(Error::InvalidDataset("no treatment column".into()));
        }
        Ok(layout)
    }

    fn stage_one(&self) -> Vec<&str> {
        self.x
            .iter()
            .chain(&self.zplus)
            .chain(&self.zminus)
            .map(String::as_str)
            .collect()
    }

    fn x_names(&self) -> Vec<&str> {
        self.x.iter().map(String::as_str).collect()
    }

    fn stage_two(&self) -> Vec<&str> {
        self.x.iter().chain(&self.zplus).map(String::as_str).collect()
    }

    fn range(&self, role: Role) -> BTreeSet<usize> {
        let (nx, np, nm) = (self.x.len(), self.zplus.len(), self.zminus.len());
        match role {
            Role::X => (0..nx).collect(),
            Role::Zplus => (nx..nx + np).collect(),
            Role::Zminus => (nx + np..nx + np + nm).collect(),
            _ => BTreeSet::new(),
        }
    }
}

fn expect(d: &LabeledDataset, p: Provenance, what: &str) -> Result<()> {
    if d.provenance() != p {
        return Err(Error::InvalidDataset(format!("{what} must have provenance {p:?}")));
    }
    Ok(())
}

fn check_refs(map: &FeatureMap, allowed: &BTreeSet<usize>, what: &str) -> Result<()> {
    match map.referenced_columns().iter().find(|c| !allowed.contains(c)) {
        Some(c) => Err(Error::CaseMismatch(format!(
            "{what} references column {c}, outside {allowed:?}"
        ))),
        None => Ok(()),
    }
}

fn fit_on(
    data: &DMatrix<f64>,
    response: &[f64],
    map: &FeatureMap,
    ridge: Option<(&[f64], usize, u64)>,
) -> Result<FittedLinearModel> {
    let design = expand_features(map, data)?.with_response(DVector::from_column_slice(response))?;
    fit_stage(&design, map, ridge)
}

fn model_terms(model: &FittedLinearModel) -> BTreeMap<Monomial, f64> {
    let mut out = BTreeMap::new();
    for (t, &c) in model.feature_map().terms().iter().zip(model.coefficients()) {
        *out.entry(t.clone()).or_insert(0.0) += c;
    }
    out
}

fn stage_one(s: &LabeledDataset, layout: &Layout, cfg: &StageConfig) -> Result<FittedLinearModel> {
    let all = layout.range(Role::X)
        .into_iter()
        .chain(layout.range(Role::Zplus))
        .chain(layout.range(Role::Zminus))
        .collect();
    check_refs(&cfg.stage_one_map, &all, "stage-one map")?;
    let data = s.matrix(&layout.stage_one())?;
    fit_on(&data, s.response()?, &cfg.stage_one_map, cfg.ridge(false, 1))
}

/// Regresses `Y` on treatment features over the selected data only.
pub fn fit_naive(s: &LabeledDataset, map: &FeatureMap) -> Result<CausalCurve> {
    expect(s, Provenance::Selected, "naive training data")?;
    let layout = Layout::of(s)?;
    check_refs(map, &layout.range(Role::X), "naive map")?;
    let model = fit_on(&s.matrix(&layout.x_names())?, s.response()?, map, None)?;
    Ok(CausalCurve::new(
        EstimatorKind::Naive,
        None,
        layout.x.clone(),
        model_terms(&model),
        model,
        Vec::new(),
    ))
}

/// Repeated regression: fit `Y` on `(X, Z)` in the selected data, predict
/// over the external data, then regress the predictions on `X` there.
pub fn fit_rr(s: &LabeledDataset, d: &LabeledDataset, cfg: &StageConfig) -> Result<CausalCurve> {
    expect(s, Provenance::Selected, "selected data")?;
    expect(d, Provenance::External, "external data")?;
    cfg.validate()?;
    let layout = Layout::of(s)?;
    check_refs(&cfg.stage_two_map, &layout.range(Role::X), "repeated-regression stage-two map")?;
    let one = stage_one(s, &layout, cfg)?;
    let imputed = predict(&one, &d.matrix(&layout.stage_one())?)?;
    let two = fit_on(
        &d.matrix(&layout.x_names())?,
        imputed.as_slice(),
        &cfg.stage_two_map,
        cfg.ridge(true, 2),
    )?;
    Ok(CausalCurve::new(
        EstimatorKind::RepeatedRegression,
        None,
        layout.x.clone(),
        model_terms(&two),
        one,
        vec![two],
    ))
}

/// `b0 + b1 x + b2 (a0 + a1 x)` for a stage one over `{1, x, z}` and a
/// regression of `z` on `{1, x}`.
pub fn rr_closed_form(stage_one: &FittedLinearModel, stage_two: &FittedLinearModel, x: f64) -> Result<f64> {
    let lin = |cols: &[usize]| {
        let mut t = vec![Monomial::intercept()];
        t.extend(cols.iter().map(|&c| Monomial::power(c, 1)));
        t
    };
    if stage_one.feature_map().terms() != lin(&[0, 1]).as_slice() {
        return Err(Error::InvalidArgument(
            "closed form needs a stage one over {1, x, z}".into(),
        ));
    }
    if stage_two.feature_map().terms() != lin(&[0]).as_slice() {
        return Err(Error::InvalidArgument(
            "closed form needs a stage two over {1, x}".into(),
        ));
    }
    let b = stage_one.coefficients();
    let a = stage_two.coefficients();
    Ok(b[0] + b[1] * x + b[2] * (a[0] + a[1] * x))
}

/// Read-only view of the external data in the stage-one column layout;
/// columns the external data lacks are `None`.
struct ExternalView<'a> {
    cols: Vec<Option<&'a [f64]>>,
    names: Vec<&'a str>,
    n: usize,
}

impl<'a> ExternalView<'a> {
    fn new(d: &'a LabeledDataset, layout: &'a Layout) -> Self {
        let names = layout.stage_one();
        let cols = names.iter().map(|n| d.values(n).ok()).collect();
        ExternalView { cols, names, n: d.nrows() }
    }

    fn require(&self, m: &Monomial) -> Result<()> {
        for &(c, _) in m.factors() {
            if self.cols[c].is_none() {
                return Err(Error::ColumnNotFound(format!(
                    "{} (needed in external data)",
                    self.names[c]
                )));
            }
        }
        Ok(())
    }

    fn values(&self, m: &Monomial) -> Result<Vec<f64>> {
        self.require(m)?;
        Ok((0..self.n)
            .map(|i| {
                m.factors()
                    .iter()
                    .fold(1.0, |acc, &(c, e)| acc * self.cols[c].unwrap()[i].powi(e as i32))
            })
            .collect())
    }

    fn mean(&self, m: &Monomial) -> Result<f64> {
        if m.is_intercept() {
            return Ok(1.0);
        }
        Ok(self.values(m)?.iter().sum::<f64>() / self.n as f64)
    }
}

fn check_case_columns(case: TsrCase, layout: &Layout) -> Result<()> {
    let (np, nm) = (layout.zplus.len(), layout.zminus.len());
    let ok = match case {
        TsrCase::NoProxies => np == 0 && nm == 0,
        TsrCase::ZplusOnly => np > 0 && nm == 0,
        TsrCase::ZminusOnlyUnconfounded | TsrCase::FullLinearShortcut | TsrCase::FullIntegral => {
            nm > 0
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::CaseMismatch(format!(
            "case {case} does not fit {np} Z+ and {nm} Z- columns"
        )))
    }
}

/// The two-step regression estimator.
///
/// Stage one fits `Y` on `(X, Z+, Z-)` over the selected data. Every stage-one
/// term `x^a h(Z+) g(Z-)` is then replaced by its interventional expectation
/// computed from the external data: `Z+` factors by their empirical means,
/// `Z-` factors by a stage-two regression on `X` (and `Z+`), averaged over
/// the empirical distribution of `Z+` or evaluated at its mean, per `case`.
pub fn fit_tsr(
    s: &LabeledDataset,
    d: &LabeledDataset,
    case: TsrCase,
    cfg: &StageConfig,
) -> Result<CausalCurve> {
    expect(s, Provenance::Selected, "selected data")?;
    expect(d, Provenance::External, "external data")?;
    cfg.validate()?;
    let layout = Layout::of(s)?;
    check_case_columns(case, &layout)?;
    let xs = layout.range(Role::X);
    let zp = layout.range(Role::Zplus);

    let one = stage_one(s, &layout, cfg)?;
    let view = ExternalView::new(d, &layout);

    let two_allowed: BTreeSet<usize> = match case {
        TsrCase::ZminusOnlyUnconfounded => xs.clone(),
        _ => xs.union(&zp).copied().collect(),
    };
    if case.uses_zminus() {
        check_refs(&cfg.stage_two_map, &two_allowed, "stage-two map")?;
        if case == TsrCase::FullLinearShortcut {
            if let Some(t) = cfg
                .stage_two_map
                .terms()
                .iter()
                .find(|t| zp.iter().map(|&c| t.exponent_of(c)).sum::<u32>() > 1)
            {
                return Err(Error::CaseMismatch(format!(
                    "linear shortcut needs a stage-two map linear in Z+, found term {t}"
                )));
            }
        }
    }

    let zplus_mean: Vec<f64> = zp
        .iter()
        .map(|&c| view.mean(&Monomial::power(c, 1)))
        .collect::<Result<_>>()?;
    let at_mean = |m: &Monomial| -> f64 {
        m.factors()
            .iter()
            .fold(1.0, |acc, &(c, e)| acc * zplus_mean[c - xs.len()].powi(e as i32))
    };

    let mut stage_two: BTreeMap<Monomial, FittedLinearModel> = BTreeMap::new();
    let mut curve: BTreeMap<Monomial, f64> = BTreeMap::new();
    let mut mean_cache: BTreeMap<Monomial, f64> = BTreeMap::new();
    let mut mean_of = |m: &Monomial| -> Result<f64> {
        if let Some(v) = mean_cache.get(m) {
            return Ok(*v);
        }
        let v = view.mean(m)?;
        mean_cache.insert(m.clone(), v);
        Ok(v)
    };

    for (term, &beta) in one.feature_map().terms().iter().zip(one.coefficients()) {
        let (xm, rest) = term.split(&xs);
        let (hm, gm) = rest.split(&zp);
        if gm.is_intercept() {
            *curve.entry(xm).or_insert(0.0) += beta * mean_of(&hm)?;
            continue;
        }
        if !hm.is_intercept() && case != TsrCase::FullIntegral {
            return Err(Error::CaseMismatch(format!(
                "stage-one term {term} mixes Z+ and Z-; only {} supports it",
                TsrCase::FullIntegral
            )));
        }
        if !stage_two.contains_key(&gm) {
            let target = view.values(&gm)?;
            let data = d.matrix(&layout.stage_two())?;
            let stream = 3 + stage_two.len() as u64;
            let model = fit_on(&data, &target, &cfg.stage_two_map, cfg.ridge(true, stream))?;
            stage_two.insert(gm.clone(), model);
        }
        let model = &stage_two[&gm];
        for (t, &gamma) in model.feature_map().terms().iter().zip(model.coefficients()) {
            let (tx, tz) = t.split(&xs);
            let zfactor = match case {
                TsrCase::FullIntegral => mean_of(&hm.times(&tz))?,
                TsrCase::FullLinearShortcut => at_mean(&tz),
                _ => 1.0,
            };
            *curve.entry(xm.times(&tx)).or_insert(0.0) += beta * gamma * zfactor;
        }
    }

    Ok(CausalCurve::new(
        EstimatorKind::TwoStep,
        Some(case),
        layout.x.clone(),
        curve,
        one,
        stage_two.into_values().collect(),
    ))
}
