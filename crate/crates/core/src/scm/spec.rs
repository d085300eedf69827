use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `coef * prod(var^power)`; an empty `powers` map is a constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    #[serde(default)]
    pub powers: BTreeMap<String, u32>,
}

impl Term {
    pub fn constant(coef: f64) -> Self {
        Term {
            coef,
            powers: BTreeMap::new(),
        }
    }

    pub fn var(coef: f64, name: &str) -> Self {
        Term::pow(coef, name, 1)
    }

    pub fn pow(coef: f64, name: &str, power: u32) -> Self {
        Term {
            coef,
            powers: [(name.to_string(), power)].into(),
        }
    }

    pub fn product(coef: f64, factors: &[(&str, u32)]) -> Self {
        Term {
            coef,
            powers: factors.iter().map(|&(n, p)| (n.to_string(), p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Assignment {
    /// `name ~ N(mean, sd^2)`.
    Exogenous { name: String, mean: f64, sd: f64 },
    /// `name := sum(terms) + noise_coef * N(0, noise_sd^2)`.
    Structural {
        name: String,
        terms: Vec<Term>,
        #[serde(default)]
        noise_coef: f64,
        #[serde(default = "one")]
        noise_sd: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Assignment {
    pub fn exogenous(name: &str, mean: f64, sd: f64) -> Self {
        Assignment::Exogenous {
            name: name.to_string(),
            mean,
            sd,
        }
    }

    /// Structural assignment with standard-normal noise scaled by `noise_coef`.
    pub fn structural(name: &str, terms: Vec<Term>, noise_coef: f64) -> Self {
        Assignment::Structural {
            name: name.to_string(),
            terms,
            noise_coef,
            noise_sd: 1.0,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Assignment::Exogenous { name, .. } | Assignment::Structural { name, .. } => name,
        }
    }
}

/// An ordered structural causal model with polynomial mechanisms and
/// Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScmSpec {
    pub variables: Vec<Assignment>,
    pub treatment: String,
    pub target: String,
    #[serde(default)]
    pub zplus: Vec<String>,
    #[serde(default)]
    pub zminus: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    LessEq,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = ">=")]
    GreaterEq,
}

impl Comparator {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Comparator::Less => lhs < rhs,
            Comparator::LessEq => lhs <= rhs,
            Comparator::Greater => lhs > rhs,
            Comparator::GreaterEq => lhs >= rhs,
        }
    }
}

/// `sum(expr) <comparator> constant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub expr: Vec<Term>,
    pub comparator: Comparator,
    pub constant: f64,
}

impl Condition {
    pub fn new(expr: Vec<Term>, comparator: Comparator, constant: f64) -> Self {
        Condition {
            expr,
            comparator,
            constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectionSpec {
    /// Selected iff every condition holds.
    Threshold { conditions: Vec<Condition> },
    /// Selected with probability `prod(sigmoid(sign * var))`.
    LogisticProduct { factors: Vec<(f64, String)> },
}

impl SelectionSpec {
    pub fn threshold(conditions: Vec<Condition>) -> Self {
        SelectionSpec::Threshold { conditions }
    }

    pub fn logistic(factors: &[(f64, &str)]) -> Self {
        SelectionSpec::LogisticProduct {
            factors: factors.iter().map(|&(s, v)| (s, v.to_string())).collect(),
        }
    }

    pub fn referenced(&self) -> BTreeSet<&str> {
        match self {
            SelectionSpec::Threshold { conditions } => conditions
                .iter()
                .flat_map(|c| c.expr.iter())
                .flat_map(|t| t.powers.keys().map(String::as_str))
                .collect(),
            SelectionSpec::LogisticProduct { factors } => {
                factors.iter().map(|(_, v)| v.as_str()).collect()
            }
        }
    }
}

/// Index-based polynomial used during sampling.
#[derive(Debug, Clone)]
pub(crate) struct CompiledPoly(pub Vec<(f64, Vec<(usize, i32)>)>);

impl CompiledPoly {
    pub fn compile(terms: &[Term], index: &BTreeMap<&str, usize>, limit: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            if !t.coef.is_finite() {
                return Err(Error::InvalidScm("non-finite coefficient".into()));
            }
            let mut f = Vec::new();
            for (name, &p) in &t.powers {
                let i = *index
                    .get(name.as_str())
                    .ok_or_else(|| Error::InvalidScm(format!("unknown variable '{name}'")))?;
                if i >= limit {
                    return Err(Error::InvalidScm(format!(
                        "'{name}' is used before it is assigned"
                    )));
                }
                if p > 0 {
                    f.push((i, p as i32));
                }
            }
            out.push((t.coef, f));
        }
        Ok(CompiledPoly(out))
    }

    #[inline]
    pub fn eval(&self, cols: &[Vec<f64>], row: usize) -> f64 {
        self.0
            .iter()
            .map(|(c, f)| f.iter().fold(*c, |acc, &(i, p)| acc * cols[i][row].powi(p)))
            .sum()
    }
}

impl ScmSpec {
    pub fn index(&self) -> BTreeMap<&str, usize> {
        self.variables
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name(), i))
            .collect()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| Error::InvalidScm(format!("unknown variable '{name}'")))
    }

    pub fn validate(&self) -> Result<()> {
        let index = self.index();
        if index.len() != self.variables.len() {
            return Err(Error::InvalidScm("duplicate variable names".into()));
        }
        for (i, a) in self.variables.iter().enumerate() {
            match a {
                Assignment::Exogenous { mean, sd, .. } => {
                    if !mean.is_finite() || !sd.is_finite() || *sd < 0.0 {
                        return Err(Error::InvalidScm(format!("bad parameters for '{}'", a.name())));
                    }
                }
                Assignment::Structural {
                    terms,
                    noise_coef,
                    noise_sd,
                    ..
                } => {
                    CompiledPoly::compile(terms, &index, i)?;
                    if !noise_coef.is_finite() || !noise_sd.is_finite() || *noise_sd < 0.0 {
                        return Err(Error::InvalidScm(format!("bad noise for '{}'", a.name())));
                    }
                }
            }
        }
        let x = self.position(&self.treatment)?;
        let y = self.position(&self.target)?;
        if x == y {
            return Err(Error::InvalidScm("treatment and target coincide".into()));
        }
        let mut seen = BTreeSet::from([self.treatment.as_str(), self.target.as_str()]);
        for z in self.zplus.iter().chain(&self.zminus) {
            self.position(z)?;
            if !seen.insert(z) {
                return Err(Error::InvalidScm(format!("'{z}' has more than one role")));
            }
        }
        Ok(())
    }

    pub fn validate_selection(&self, sel: &SelectionSpec) -> Result<()> {
        for v in sel.referenced() {
            self.position(v)?;
        }
        if let SelectionSpec::Threshold { conditions } = sel {
            if conditions.iter().any(|c| c.constant.is_nan()) {
                return Err(Error::InvalidScm("NaN selection threshold".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ScmSpec = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        spec.validate()?;
        Ok(spec)
    }
}
