use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    X,
    Zplus,
    Zminus,
    Y,
    S,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::X => "X",
            Role::Zplus => "Z+",
            Role::Zminus => "Z-",
            Role::Y => "Y",
            Role::S => "S",
        })
    }
}

/// Where a dataset comes from: the selected sample or external data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Selected,
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub role: Role,
    pub values: Vec<f64>,
}

/// Named numeric columns with roles.
///
/// Selected data carries `Y` and, if present, `S = 1` everywhere; external
/// data carries only treatment and proxy columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    columns: Vec<Column>,
    nrows: usize,
    provenance: Provenance,
}

impl LabeledDataset {
    pub fn new(provenance: Provenance, columns: Vec<Column>) -> Result<Self> {
        let nrows = columns.first().map_or(0, |c| c.values.len());
        if nrows == 0 {
            return Err(Error::InvalidDataset("dataset has no rows".into()));
        }
        let mut names = BTreeSet::new();
        for c in &columns {
            if !names.insert(c.name.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate column '{}'", c.name)));
            }
            if c.values.len() != nrows {
                return Err(Error::InvalidDataset(format!(
                    "column '{}' has {} rows, expected {nrows}",
                    c.name,
                    c.values.len()
                )));
            }
            if let Some(row) = c.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "non-finite value in column '{}' at row {row}",
                    c.name
                )));
            }
        }
        let count = |r: Role| columns.iter().filter(|c| c.role == r).count();
        match provenance {
            Provenance::Selected => {
                if count(Role::Y) != 1 {
                    return Err(Error::InvalidDataset(
                        "selected data needs exactly one Y column".into(),
                    ));
                }
                if let Some(s) = columns.iter().find(|c| c.role == Role::S) {
                    if s.values.iter().any(|&v| v != 1.0) {
                        return Err(Error::InvalidDataset(
                            "selected data must have S = 1 on every row".into(),
                        ));
                    }
                }
            }
            Provenance::External => {
                if count(Role::Y) + count(Role::S) > 0 {
                    return Err(Error::InvalidDataset(
                        "external data holds treatment and proxy columns only".into(),
                    ));
                }
            }
        }
        Ok(LabeledDataset {
            columns,
            nrows,
            provenance,
        })
    }

    /// Convenience constructor from `(name, role, values)` triples.
    pub fn from_parts(
        provenance: Provenance,
        parts: Vec<(&str, Role, Vec<f64>)>,
    ) -> Result<Self> {
        let columns = parts
            .into_iter()
            .map(|(name, role, values)| Column {
                name: name.to_string(),
                role,
                values,
            })
            .collect();
        LabeledDataset::new(provenance, columns)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::ColumnNotFound(name.to_string()))
    }

    pub fn values(&self, name: &str) -> Result<&[f64]> {
        Ok(&self.column(name)?.values)
    }

    /// Column names with the given role, in storage order.
    pub fn names_with_role(&self, role: Role) -> Vec<&str> {
        self.columns
            .iter()
            .filter(|c| c.role == role)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn response(&self) -> Result<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.role == Role::Y)
            .map(|c| c.values.as_slice())
            .ok_or_else(|| Error::ColumnNotFound("Y".into()))
    }

    /// Row-major table of the named columns, in the order given.
    pub fn matrix(&self, names: &[&str]) -> Result<DMatrix<f64>> {
        let cols: Vec<&[f64]> = names.iter().map(|n| self.values(n)).collect::<Result<_>>()?;
        Ok(DMatrix::from_fn(self.nrows, cols.len(), |i, j| cols[j][i]))
    }

    /// Copy keeping only the listed rows.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                role: c.role,
                values: rows.iter().map(|&r| c.values[r]).collect(),
            })
            .collect();
        LabeledDataset::new(self.provenance, columns)
    }
}
