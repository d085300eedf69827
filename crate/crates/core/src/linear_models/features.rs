//! Polynomial feature maps and design-matrix construction.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A product of input columns raised to positive integer powers.
///
/// Factors are kept sorted by column index with strictly positive exponents,
/// so two monomials are equal exactly when they describe the same function.
/// The empty monomial is the intercept.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn intercept() -> Self {
        Monomial(Vec::new())
    }

    pub fn power(column: usize, exponent: u32) -> Self {
        Monomial::from_factors([(column, exponent)])
    }

    /// Builds a monomial from `(column, exponent)` pairs; repeated columns
    /// have their exponents summed and zero exponents are dropped.
    pub fn from_factors(factors: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut acc: std::collections::BTreeMap<usize, u32> = Default::default();
        for (c, e) in factors {
            *acc.entry(c).or_default() += e;
        }
        Monomial(acc.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn is_intercept(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent_of(&self, column: usize) -> u32 {
        self.0
            .iter()
            .find(|&&(c, _)| c == column)
            .map_or(0, |&(_, e)| e)
    }

    /// Splits the monomial into the part over `columns` and the rest.
    pub fn split(&self, columns: &BTreeSet<usize>) -> (Monomial, Monomial) {
        let (inside, outside): (Vec<_>, Vec<_>) =
            self.0.iter().partition(|(c, _)| columns.contains(c));
        (Monomial(inside), Monomial(outside))
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        Monomial::from_factors(self.0.iter().chain(&other.0).copied())
    }

    /// Relabels columns through `map`, which must cover every referenced column.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Monomial {
        Monomial::from_factors(self.0.iter().map(|&(c, e)| (map(c), e)))
    }

    #[inline]
    pub fn eval(&self, row: &[f64]) -> f64 {
        self.0
            .iter()
            .fold(1.0, |acc, &(c, e)| acc * row[c].powi(e as i32))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(c, e)| {
                if e == 1 {
                    format!("c{c}")
                } else {
                    format!("c{c}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// An ordered list of monomials turning input rows into regressors.
///
/// The intercept is always the first term and appears exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFeatureMap", into = "RawFeatureMap")]
pub struct FeatureMap {
    terms: Vec<Monomial>,
    max_degree: u32,
}

#[derive(Serialize, Deserialize)]
struct RawFeatureMap {
    terms: Vec<Monomial>,
    max_degree: u32,
}

impl TryFrom<RawFeatureMap> for FeatureMap {
    type Error = Error;
    fn try_from(raw: RawFeatureMap) -> Result<Self> {
        FeatureMap::new(raw.terms, raw.max_degree)
    }
}

impl From<FeatureMap> for RawFeatureMap {
    fn from(m: FeatureMap) -> Self {
        RawFeatureMap {
            terms: m.terms,
            max_degree: m.max_degree,
        }
    }
}

impl FeatureMap {
    pub fn new(terms: Vec<Monomial>, max_degree: u32) -> Result<Self> {
        if max_degree < 1 {
            return Err(Error::InvalidFeatureMap("max_degree must be at least 1".into()));
        }
        match terms.first() {
            Some(t) if t.is_intercept() => {}
            _ => return Err(Error::InvalidFeatureMap("first term must be the intercept".into())),
        }
        let mut seen = BTreeSet::new();
        for t in &terms {
            if !seen.insert(t) {
                return Err(Error::InvalidFeatureMap(format!("duplicate term {t}")));
            }
            if t.degree() > max_degree {
                return Err(Error::InvalidFeatureMap(format!(
                    "term {t} exceeds max degree {max_degree}"
                )));
            }
        }
        Ok(FeatureMap { terms, max_degree })
    }

    pub fn intercept_only() -> Self {
        FeatureMap {
            terms: vec![Monomial::intercept()],
            max_degree: 1,
        }
    }

    /// Full polynomial over `columns`: every monomial of total degree up to
    /// `degree`, ordered by degree and then lexicographically.
    pub fn polynomial(columns: &[usize], degree: u32) -> Result<Self> {
        let mut terms = vec![Monomial::intercept()];
        let mut frontier = vec![Vec::<usize>::new()];
        for _ in 0..degree {
            let mut next = Vec::new();
            for combo in &frontier {
                let start = combo.last().map_or(0, |&last| {
                    columns.iter().position(|&c| c == last).unwrap_or(0)
                });
                for &c in &columns[start..] {
                    let mut grown = combo.clone();
                    grown.push(c);
                    next.push(grown);
                }
            }
            for combo in &next {
                terms.push(Monomial::from_factors(combo.iter().map(|&c| (c, 1))));
            }
            frontier = next;
        }
        FeatureMap::new(terms, degree.max(1))
    }

    /// Separate powers per column with no interactions, e.g. `[(0, 2), (1, 1)]`
    /// gives `{1, c0, c0^2, c1}`.
    pub fn additive(degrees: &[(usize, u32)]) -> Result<Self> {
        let mut terms = vec![Monomial::intercept()];
        for &(c, d) in degrees {
            for e in 1..=d {
                terms.push(Monomial::power(c, e));
            }
        }
        let max = degrees.iter().map(|&(_, d)| d).max().unwrap_or(1).max(1);
        FeatureMap::new(terms, max)
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn referenced_columns(&self) -> BTreeSet<usize> {
        self.terms
            .iter()
            .flat_map(|t| t.factors().iter().map(|&(c, _)| c))
            .collect()
    }

    pub fn row(&self, input: &[f64], out: &mut [f64]) {
        for (o, t) in out.iter_mut().zip(&self.terms) {
            *o = t.eval(input);
        }
    }
}

/// Regressors produced by a [`FeatureMap`], optionally paired with a response.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: DMatrix<f64>,
    response: Option<DVector<f64>>,
}

impl DesignMatrix {
    pub fn new(rows: DMatrix<f64>, response: Option<DVector<f64>>) -> Result<Self> {
        if rows.nrows() == 0 {
            return Err(Error::InvalidArgument("design matrix needs at least one row".into()));
        }
        if let Some((i, j)) = first_non_finite(&rows) {
            return Err(Error::NonFinite { row: i, column: j });
        }
        if let Some(y) = &response {
            if y.len() != rows.nrows() {
                return Err(Error::InvalidArgument(format!(
                    "response has {} entries for {} rows",
                    y.len(),
                    rows.nrows()
                )));
            }
            if let Some(i) = y.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: i, column: rows.ncols() });
            }
        }
        Ok(DesignMatrix { rows, response })
    }

    pub fn with_response(self, response: DVector<f64>) -> Result<Self> {
        DesignMatrix::new(self.rows, Some(response))
    }

    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    pub fn response(&self) -> Option<&DVector<f64>> {
        self.response.as_ref()
    }

    pub fn nrows(&self) -> usize {
        self.rows.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.rows.ncols()
    }

    /// Keeps the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> DesignMatrix {
        DesignMatrix {
            rows: self.rows.select_rows(idx),
            response: self.response.as_ref().map(|y| y.select_rows(idx)),
        }
    }
}

fn first_non_finite(m: &DMatrix<f64>) -> Option<(usize, usize)> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Expands every row of `data` (n × k) through `fmap`.
pub fn expand_features(fmap: &FeatureMap, data: &DMatrix<f64>) -> Result<DesignMatrix> {
    if let Some(&c) = fmap.referenced_columns().iter().find(|&&c| c >= data.ncols()) {
        return Err(Error::MissingColumn {
            column: c,
            available: data.ncols(),
        });
    }
    if let Some((i, j)) = first_non_finite(data) {
        return Err(Error::NonFinite { row: i, column: j });
    }
    let n = data.nrows();
    let p = fmap.len();
    let mut out = DMatrix::zeros(n, p);
    let mut input = vec![0.0; data.ncols()];
    let mut feats = vec![0.0; p];
    for i in 0..n {
        for (j, v) in input.iter_mut().enumerate() {
            *v = data[(i, j)];
        }
        fmap.row(&input, &mut feats);
        for (j, &f) in feats.iter().enumerate() {
            out[(i, j)] = f;
        }
    }
    DesignMatrix::new(out, None)
}
