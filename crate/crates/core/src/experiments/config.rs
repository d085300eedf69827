use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scm::SampleMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EstimatorName {
    #[serde(rename = "naive")]
    Naive,
    #[serde(rename = "rr")]
    Rr,
    #[serde(rename = "rr-ridge")]
    RrRidge,
    #[serde(rename = "tsr")]
    Tsr,
    #[serde(rename = "tsr-ridge")]
    TsrRidge,
}

impl EstimatorName {
    pub const ALL: [EstimatorName; 5] = [
        EstimatorName::Naive,
        EstimatorName::Rr,
        EstimatorName::RrRidge,
        EstimatorName::Tsr,
        EstimatorName::TsrRidge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorName::Naive => "naive",
            EstimatorName::Rr => "rr",
            EstimatorName::RrRidge => "rr-ridge",
            EstimatorName::Tsr => "tsr",
            EstimatorName::TsrRidge => "tsr-ridge",
        }
    }
}

impl fmt::Display for EstimatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown estimator '{s}'")))
    }
}

/// One replication study: an example, sample sizes, modes and estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub example: String,
    #[serde(default = "default_n")]
    pub n: Vec<usize>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_modes")]
    pub modes: Vec<SampleMode>,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorName>,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; `None` uses every available core.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Explicit band range; defaults to the central 99% of the treatment.
    #[serde(default)]
    pub grid_range: Option<(f64, f64)>,
    /// Monte Carlo draws per point when the truth comes from the oracle.
    #[serde(default = "default_oracle_mc")]
    pub oracle_mc: usize,
}

fn default_n() -> Vec<usize> {
    vec![500, 1000, 5000]
}
fn default_runs() -> usize {
    100
}
fn default_modes() -> Vec<SampleMode> {
    vec![SampleMode::Disjoint]
}
fn default_estimators() -> Vec<EstimatorName> {
    EstimatorName::ALL.to_vec()
}
fn default_grid_points() -> usize {
    101
}
fn default_oracle_mc() -> usize {
    1_000_000
}

impl ExperimentConfig {
    pub fn new(example: &str) -> Self {
        ExperimentConfig {
            example: example.to_string(),
            n: default_n(),
            runs: default_runs(),
            modes: default_modes(),
            estimators: default_estimators(),
            seed: 0,
            workers: None,
            grid_points: default_grid_points(),
            grid_range: None,
            oracle_mc: default_oracle_mc(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        if self.n.is_empty() || self.n.iter().any(|&n| n < 10) {
            return Err(Error::InvalidArgument("every n must be at least 10".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::InvalidArgument("no sampling mode given".into()));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
        }
        if self.oracle_mc == 0 {
            return Err(Error::InvalidArgument("oracle_mc must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        if let Some((lo, hi)) = self.grid_range {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidArgument(format!("bad grid range ({lo}, {hi})")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
