use rayon::prelude::*;

use super::config::{EstimatorName, ExperimentConfig};
use crate::error::{Error, Result};
use crate::estimators::{evaluate_mse, fit_naive, fit_rr, fit_tsr, CausalCurve, LabeledDataset};
use crate::graph::TsrCase;
use crate::scm::{
    builtin_example, linspace, make_paired, oracle_do_curve, sample, BuiltinExample, OracleCurve,
    SampleMode,
};
use crate::seed::{self, tag};
use crate::stats;

/// Ground truth used for errors and bands.
#[derive(Debug, Clone)]
pub enum Truth {
    Analytic(fn(f64) -> f64),
    Oracle(OracleCurve),
}

impl Truth {
    pub fn at(&self, x: f64) -> f64 {
        match self {
            Truth::Analytic(f) => f(x),
            Truth::Oracle(o) => o.interpolate(x),
        }
    }

    /// The closed form if the example has one, else a 201-point oracle curve
    /// spanning the treatment's observed range.
    pub fn for_example(ex: &BuiltinExample, n_mc: usize, seed: u64) -> Result<Self> {
        if let Some(f) = ex.truths.causal_effect {
            return Ok(Truth::Analytic(f));
        }
        let pilot = sample(&ex.scm, 200_000, seed::derive(seed, 0, tag::GRID))?;
        let x = pilot.column(&ex.scm.treatment)?;
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let grid = linspace(lo, hi, 201);
        Ok(Truth::Oracle(oracle_do_curve(&ex.scm, &grid, n_mc, seed::derive(seed, 0, tag::ORACLE))?))
    }
}

/// Fits one named estimator on a paired training sample.
pub fn fit_named(
    ex: &BuiltinExample,
    name: EstimatorName,
    selected: &LabeledDataset,
    external: &LabeledDataset,
    cv_seed: u64,
) -> Result<CausalCurve> {
    let full = matches!(ex.case, TsrCase::FullLinearShortcut | TsrCase::FullIntegral);
    match name {
        EstimatorName::Naive => fit_naive(selected, &ex.maps.treatment),
        EstimatorName::Rr => fit_rr(selected, external, &ex.rr_config()),
        EstimatorName::RrRidge => fit_rr(
            selected,
            external,
            &ex.rr_config().with_ridge(true, false).with_cv_seed(cv_seed),
        ),
        EstimatorName::Tsr => fit_tsr(selected, external, ex.case, &ex.tsr_config()),
        EstimatorName::TsrRidge => fit_tsr(
            selected,
            external,
            ex.case,
            &ex.tsr_config().with_ridge(true, full).with_cv_seed(cv_seed),
        ),
    }
}

/// Outcome of one estimator in one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub mse_s: f64,
    pub mse_d: f64,
    pub grid_values: Vec<f64>,
}

/// Aggregated errors for one (estimator, n, mode) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub estimator: EstimatorName,
    pub n: usize,
    pub mode: SampleMode,
    pub mse_s_mean: f64,
    pub mse_s_sd: f64,
    pub mse_d_mean: f64,
    pub mse_d_sd: f64,
    /// Successful runs.
    pub runs: usize,
    pub failures: usize,
    /// Per-run errors `(run, mse_s, mse_d)`; failed runs are absent.
    pub per_run: Vec<(usize, f64, f64)>,
}

/// Pointwise central 95% band of estimated curves.
#[derive(Debug, Clone, PartialEq)]
pub struct BandReport {
    pub x: Vec<f64>,
    pub lower: Vec<f64>,
    pub mean: Vec<f64>,
    pub upper: Vec<f64>,
    pub truth: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellBand {
    pub estimator: EstimatorName,
    pub n: usize,
    pub mode: SampleMode,
    pub band: BandReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub example: String,
    pub runs: usize,
    pub cells: Vec<CellSummary>,
    pub bands: Vec<CellBand>,
}

impl ExperimentReport {
    pub fn cell(&self, estimator: EstimatorName, n: usize, mode: SampleMode) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.estimator == estimator && c.n == n && c.mode == mode)
    }

    pub fn band(&self, estimator: EstimatorName, n: usize, mode: SampleMode) -> Option<&BandReport> {
        self.bands
            .iter()
            .find(|b| b.estimator == estimator && b.n == n && b.mode == mode)
            .map(|b| &b.band)
    }

    /// Fails when any cell lost more than 10% of its runs.
    pub fn check(&self) -> Result<()> {
        match self.cells.iter().find(|c| c.failures * 10 > self.runs) {
            Some(c) => Err(Error::ExperimentDegraded {
                estimator: c.estimator.to_string(),
                n: c.n,
                failures: c.failures,
                runs: self.runs,
            }),
            None => Ok(()),
        }
    }
}

/// Pointwise 2.5% and 97.5% type-7 quantiles and the mean over runs.
pub fn compute_band(x: &[f64], curves: &[Vec<f64>], truth: &[f64]) -> Result<BandReport> {
    if curves.is_empty() {
        return Err(Error::InvalidArgument("band needs at least one curve".into()));
    }
    if truth.len() != x.len() || curves.iter().any(|c| c.len() != x.len()) {
        return Err(Error::InvalidArgument("curve length differs from the grid".into()));
    }
    let mut lower = Vec::with_capacity(x.len());
    let mut mean = Vec::with_capacity(x.len());
    let mut upper = Vec::with_capacity(x.len());
    let mut col = Vec::with_capacity(curves.len());
    for j in 0..x.len() {
        col.clear();
        col.extend(curves.iter().map(|c| c[j]));
        col.sort_by(f64::total_cmp);
        lower.push(stats::quantile_sorted(&col, 0.025));
        upper.push(stats::quantile_sorted(&col, 0.975));
        mean.push(stats::mean(&col));
    }
    Ok(BandReport {
        x: x.to_vec(),
        lower,
        mean,
        upper,
        truth: truth.to_vec(),
    })
}

type Cell = (EstimatorName, usize, SampleMode);

fn one_run(
    ex: &BuiltinExample,
    cfg: &ExperimentConfig,
    cells: &[Cell],
    grid: &[f64],
    truth: &Truth,
    run: usize,
) -> Vec<Option<RunOutcome>> {
    let r = run as u64;
    let train_seed = seed::derive(cfg.seed, r, tag::TRAIN);
    let test_seed = seed::derive(cfg.seed, r, tag::TEST);
    let cv_seed = seed::derive(cfg.seed, r, tag::CV);
    let mut out = Vec::with_capacity(cells.len());
    let mut current: Option<((usize, SampleMode), Result<(_, _)>)> = None;
    for &(est, n, mode) in cells {
        let fresh = current.as_ref().is_none_or(|(k, _)| *k != (n, mode));
        if fresh {
            let pair = make_paired(&ex.scm, &ex.selection, n, mode, train_seed).and_then(|train| {
                make_paired(&ex.scm, &ex.selection, n, mode, test_seed).map(|test| (train, test))
            });
            current = Some(((n, mode), pair));
        }
        let outcome = match &current.as_ref().unwrap().1 {
            Ok((train, test)) => {
                let x = &ex.scm.treatment;
                fit_named(ex, est, &train.selected, &train.external, cv_seed).and_then(|curve| {
                    let xs = test.selected.values(x)?;
                    let xd = test.external.values(x)?;
                    let mse_s = evaluate_mse(&curve, xs, |v| truth.at(v))?;
                    let mse_d = evaluate_mse(&curve, xd, |v| truth.at(v))?;
                    Ok(RunOutcome {
                        mse_s,
                        mse_d,
                        grid_values: curve.evaluate_many(grid),
                    })
                })
            }
            Err(e) => Err(e.clone()),
        };
        out.push(outcome.ok());
    }
    out
}

/// Runs every configured cell without judging the failure rate.
pub fn collect_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let ex = builtin_example(&cfg.example)?;
    let truth = Truth::for_example(&ex, cfg.oracle_mc, cfg.seed)?;
    let grid = match cfg.grid_range {
        Some((lo, hi)) => linspace(lo, hi, cfg.grid_points),
        None => ex.x_grid_with(cfg.grid_points)?,
    };
    let truth_grid: Vec<f64> = grid.iter().map(|&x| truth.at(x)).collect();

    // modes outermost so one paired sample serves every estimator
    let mut cells: Vec<Cell> = Vec::new();
    for &mode in &cfg.modes {
        for &n in &cfg.n {
            for &est in &cfg.estimators {
                cells.push((est, n, mode));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let results: Vec<Vec<Option<RunOutcome>>> = pool.install(|| {
        (0..cfg.runs)
            .into_par_iter()
            .map(|run| one_run(&ex, cfg, &cells, &grid, &truth, run))
            .collect()
    });

    let mut summaries = Vec::new();
    let mut bands = Vec::new();
    for (k, &(estimator, n, mode)) in cells.iter().enumerate() {
        let ok: Vec<(usize, &RunOutcome)> = results
            .iter()
            .enumerate()
            .filter_map(|(run, r)| r[k].as_ref().map(|o| (run, o)))
            .collect();
        let s: Vec<f64> = ok.iter().map(|(_, o)| o.mse_s).collect();
        let d: Vec<f64> = ok.iter().map(|(_, o)| o.mse_d).collect();
        let summary = CellSummary {
            estimator,
            n,
            mode,
            mse_s_mean: if s.is_empty() { f64::NAN } else { stats::mean(&s) },
            mse_s_sd: stats::sd(&s),
            mse_d_mean: if d.is_empty() { f64::NAN } else { stats::mean(&d) },
            mse_d_sd: stats::sd(&d),
            runs: ok.len(),
            failures: cfg.runs - ok.len(),
            per_run: ok.iter().map(|(run, o)| (*run, o.mse_s, o.mse_d)).collect(),
        };
        summaries.push(summary);
        if !ok.is_empty() {
            let curves: Vec<Vec<f64>> = ok.iter().map(|(_, o)| o.grid_values.clone()).collect();
            bands.push(CellBand {
                estimator,
                n,
                mode,
                band: compute_band(&grid, &curves, &truth_grid)?,
            });
        }
    }
    Ok(ExperimentReport {
        example: cfg.example.clone(),
        runs: cfg.runs,
        cells: summaries,
        bands,
    })
}

/// Runs the study and fails if more than 10% of any cell's runs failed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let report = collect_experiment(cfg)?;
    report.check()?;
    Ok(report)
}
