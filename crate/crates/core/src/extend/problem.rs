//! Problem records: jets, strata and flat obstacles in one file format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::FuncExpr;
use crate::cells::Cell;
use crate::error::{input, Result};
use crate::jet::Jet;
use crate::modulus::Modulus;
use crate::multiindex::{indices_up_to, MultiIndex};

use super::Settings;

/// A prescribed jet at one point; missing fields are 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJet {
    pub x: Vec<f64>,
    #[serde(default)]
    pub fields: BTreeMap<MultiIndex, f64>,
}

impl PointJet {
    /// Field values in graded-lex order.
    pub fn values(&self, n: usize, m: usize) -> Result<Vec<f64>> {
        if self.x.len() != n {
            return input(format!("point {:?} does not lie in R^{n}", self.x));
        }
        for a in self.fields.keys() {
            if a.dim() != n || a.order() > m {
                return input(format!("field {a} at {:?} does not belong to an {m}-jet in R^{n}", self.x));
            }
        }
        Ok(indices_up_to(n, m).iter().map(|a| self.fields.get(a).copied().unwrap_or(0.0)).collect())
    }
}

/// A stratum in adapted coordinates carrying the jet of `source`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumSpec {
    pub cell: Cell,
    pub source: FuncExpr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Declared regularity constant of the graph map; checked when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// One extension problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Modulus>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointJet>,
    /// Sampled jet; every sample becomes an isolated point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jet: Option<Jet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strata: Vec<StratumSpec>,
    /// Points of the set where the jet is flat.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_points: Vec<Vec<f64>>,
    /// Graph cells of the set where the jet is flat.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_graphs: Vec<Cell>,
    /// Declared dimension of the set; positive dimensions require strata.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

/// Top-level keys of a problem record.
pub const PROBLEM_KEYS: &[&str] = &[
    "label", "n", "m", "p", "omega", "points", "jet", "strata", "extra_points", "extra_graphs", "set_dim",
    "plateau", "cutoff",
];

impl Problem {
    pub fn new(n: usize, m: usize) -> Problem {
        Problem {
            label: None,
            n,
            m,
            p: None,
            omega: None,
            points: Vec::new(),
            jet: None,
            strata: Vec::new(),
            extra_points: Vec::new(),
            extra_graphs: Vec::new(),
            set_dim: None,
            plateau: None,
            cutoff: None,
        }
    }

    pub fn settings(&self) -> Result<Settings> {
        let mut s = Settings::new(self.m);
        if let Some(p) = self.p {
            s.p = p;
        }
        if let Some(w) = self.plateau {
            s.plateau = w;
        }
        if let Some(c) = self.cutoff {
            s.cutoff = c;
        }
        s.validate()?;
        Ok(s)
    }

    pub fn omega(&self) -> Result<Modulus> {
        match &self.omega {
            Some(w) => {
                w.validate()?;
                Ok(w.clone())
            }
            None => input("problem has no modulus of continuity"),
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| "problem".to_string())
    }
}
