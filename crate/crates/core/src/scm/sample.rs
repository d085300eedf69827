use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{Assignment, CompiledPoly, ScmSpec, SelectionSpec};
use crate::error::{Error, Result};
use crate::estimators::{Column, LabeledDataset, Provenance, Role};
use crate::seed::{self, tag};

/// Column-major draws from an SCM, one column per variable in spec order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl SampleTable {
    pub fn nrows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::ColumnNotFound(name.to_string()))
    }
}

/// `n` i.i.d. draws; deterministic in `seed`.
pub fn sample(spec: &ScmSpec, n: usize, seed: u64) -> Result<SampleTable> {
    sample_with(spec, n, seed, None)
}

fn sample_with(
    spec: &ScmSpec,
    n: usize,
    seed: u64,
    intervention: Option<(usize, f64)>,
) -> Result<SampleTable> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let index = spec.index();
    let mut rng = seed::rng(seed);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(spec.variables.len());
    for (k, a) in spec.variables.iter().enumerate() {
        let col: Vec<f64> = match (intervention, a) {
            (Some((i, x)), _) if i == k => vec![x; n],
            (_, Assignment::Exogenous { mean, sd, .. }) => (0..n)
                .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            (
                _,
                Assignment::Structural {
                    terms,
                    noise_coef,
                    noise_sd,
                    ..
                },
            ) => {
                let poly = CompiledPoly::compile(terms, &index, k)?;
                let scale = noise_coef * noise_sd;
                (0..n)
                    .map(|r| {
                        let e: f64 = rng.sample(StandardNormal);
                        poly.eval(&columns, r) + scale * e
                    })
                    .collect()
            }
        };
        if let Some(r) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidScm(format!(
                "non-finite value for '{}' at row {r}",
                a.name()
            )));
        }
        columns.push(col);
    }
    Ok(SampleTable {
        names: spec.variables.iter().map(|a| a.name().to_string()).collect(),
        columns,
    })
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Per-row selection indicator.
pub fn apply_selection(table: &SampleTable, sel: &SelectionSpec, seed: u64) -> Result<Vec<bool>> {
    let n = table.nrows();
    match sel {
        SelectionSpec::Threshold { conditions } => {
            let names: Vec<&str> = table.names.iter().map(String::as_str).collect();
            let index = names.iter().enumerate().map(|(i, &n)| (n, i)).collect();
            let compiled: Vec<_> = conditions
                .iter()
                .map(|c| {
                    CompiledPoly::compile(&c.expr, &index, names.len())
                        .map_err(|_| Error::ColumnNotFound(format!("{:?}", c.expr)))
                        .map(|p| (p, c.comparator, c.constant))
                })
                .collect::<Result<_>>()?;
            Ok((0..n)
                .map(|r| {
                    compiled
                        .iter()
                        .all(|(p, cmp, k)| cmp.holds(p.eval(&table.columns, r), *k))
                })
                .collect())
        }
        SelectionSpec::LogisticProduct { factors } => {
            let cols: Vec<(f64, &[f64])> = factors
                .iter()
                .map(|(s, v)| table.column(v).map(|c| (*s, c)))
                .collect::<Result<_>>()?;
            let mut rng = seed::rng(seed);
            Ok((0..n)
                .map(|r| {
                    let p: f64 = cols.iter().map(|(s, c)| sigmoid(s * c[r])).product();
                    rng.gen::<f64>() < p
                })
                .collect())
        }
    }
}

/// How the selected sample relates to the external data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SampleMode {
    /// The selected rows are the `S = 1` rows of the external pool.
    #[serde(rename = "subset")]
    SubsetOfD,
    /// Selected and external data come from independent pools.
    #[serde(rename = "disjoint")]
    Disjoint,
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleMode::SubsetOfD => "subset",
            SampleMode::Disjoint => "disjoint",
        })
    }
}

impl FromStr for SampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "subset" | "subset-of-d" | "subsetofd" => Ok(SampleMode::SubsetOfD),
            "disjoint" => Ok(SampleMode::Disjoint),
            other => Err(Error::Parse(format!("unknown mode '{other}' (subset or disjoint)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub selected: LabeledDataset,
    pub external: LabeledDataset,
    pub mode: SampleMode,
    /// Rows of the external pool that were selected (subset mode only).
    pub selected_rows: Option<Vec<usize>>,
}

const SELECTION_ATTEMPTS: usize = 10;

fn exported(spec: &ScmSpec) -> Vec<(&str, Role)> {
    let mut cols = vec![(spec.treatment.as_str(), Role::X)];
    cols.extend(spec.zplus.iter().map(|z| (z.as_str(), Role::Zplus)));
    cols.extend(spec.zminus.iter().map(|z| (z.as_str(), Role::Zminus)));
    cols
}

fn to_dataset(
    spec: &ScmSpec,
    table: &SampleTable,
    rows: Option<&[usize]>,
    provenance: Provenance,
) -> Result<LabeledDataset> {
    let mut cols = exported(spec);
    if provenance == Provenance::Selected {
        cols.push((spec.target.as_str(), Role::Y));
    }
    let columns = cols
        .into_iter()
        .map(|(name, role)| {
            let all = table.column(name)?;
            let values = match rows {
                Some(r) => r.iter().map(|&i| all[i]).collect(),
                None => all.to_vec(),
            };
            Ok(Column {
                name: name.to_string(),
                role,
                values,
            })
        })
        .collect::<Result<_>>()?;
    LabeledDataset::new(provenance, columns)
}

/// Draws a selected sample and an external sample of `n` pool rows each.
pub fn make_paired(
    spec: &ScmSpec,
    sel: &SelectionSpec,
    n: usize,
    mode: SampleMode,
    seed: u64,
) -> Result<PairedSample> {
    spec.validate_selection(sel)?;
    for attempt in 0..SELECTION_ATTEMPTS as u64 {
        let pool = sample(spec, n, seed::derive(seed, attempt, tag::POOL))?;
        let mask = apply_selection(&pool, sel, seed::derive(seed, attempt, tag::SELECTION))?;
        let rows: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
        if rows.is_empty() {
            continue;
        }
        let selected = to_dataset(spec, &pool, Some(&rows), Provenance::Selected)?;
        return Ok(match mode {
            SampleMode::SubsetOfD => PairedSample {
                selected,
                external: to_dataset(spec, &pool, None, Provenance::External)?,
                mode,
                selected_rows: Some(rows),
            },
            SampleMode::Disjoint => {
                let ext = sample(spec, n, seed::derive(seed, 0, tag::EXTERNAL))?;
                PairedSample {
                    selected,
                    external: to_dataset(spec, &ext, None, Provenance::External)?,
                    mode,
                    selected_rows: None,
                }
            }
        });
    }
    Err(Error::EmptySelection {
        attempts: SELECTION_ATTEMPTS,
    })
}

/// Monte Carlo estimate of `E[Y | do(X = x)]` with its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCurve {
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
}

impl OracleCurve {
    /// Linear interpolation on the grid, clamped at the ends.
    pub fn interpolate(&self, x: f64) -> f64 {
        let g = &self.x;
        if x <= g[0] {
            return self.mean[0];
        }
        let last = g.len() - 1;
        if x >= g[last] {
            return self.mean[last];
        }
        let j = g.partition_point(|&v| v <= x);
        let (x0, x1) = (g[j - 1], g[j]);
        let t = (x - x0) / (x1 - x0);
        self.mean[j - 1] * (1.0 - t) + self.mean[j] * t
    }
}

/// Replaces the treatment's mechanism by the constant `x` and averages the
/// target over `n_mc` draws, for each grid point.
pub fn oracle_do_curve(spec: &ScmSpec, x_grid: &[f64], n_mc: usize, seed: u64) -> Result<OracleCurve> {
    if n_mc == 0 {
        return Err(Error::InvalidArgument("n_mc must be at least 1".into()));
    }
    if x_grid.is_empty() {
        return Err(Error::InvalidArgument("empty oracle grid".into()));
    }
    let xi = spec.position(&spec.treatment)?;
    let results: Vec<(f64, f64)> = x_grid
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let t = sample_with(spec, n_mc, seed::derive(seed, i as u64, tag::ORACLE), Some((xi, x)))?;
            let y = t.column(&spec.target)?;
            let n = y.len() as f64;
            let mean = y.iter().sum::<f64>() / n;
            let var = if y.len() > 1 {
                y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            Ok((mean, (var / n).sqrt()))
        })
        .collect::<Result<_>>()?;
    Ok(OracleCurve {
        x: x_grid.to_vec(),
        mean: results.iter().map(|r| r.0).collect(),
        se: results.iter().map(|r| r.1).collect(),
    })
}
