//! Output formats. JSON reports are plain serde structs so they re-parse into
//! the same types; CSV rows share the float formatting.

use serde::{Deserialize, Serialize};

use super::document::{pair, Pair};
use crate::asymptotics::{BinetApproximation, ErrorProfile};
use crate::kneading::CompanionCheck;
use crate::recurrence::CVector;
use crate::series::TruncatedSeries;

pub fn series_pairs(s: &TruncatedSeries) -> Vec<Pair> {
    s.coeffs().iter().copied().map(pair).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GfReport {
    pub alpha: usize,
    /// `None` when the series comes from the document's initial condition.
    pub beta: Option<usize>,
    pub truncation: usize,
    pub coefficients: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenvalueEntry {
    pub lambda: Pair,
    pub z_root: Pair,
    pub multiplicity: usize,
    pub residual: f64,
    pub drift: f64,
}

/// `c_{i,j}^(alpha)`; `eigenvalue` indexes the `eigenvalues` list from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientEntry {
    pub eigenvalue: usize,
    pub j: usize,
    pub alpha: usize,
    pub value: Pair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorRow {
    pub n: usize,
    /// `|v_n - v^_n|` per component.
    pub errors: Vec<f64>,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymReport {
    pub truncation: usize,
    pub eigenvalues: Vec<EigenvalueEntry>,
    pub coefficients: Vec<CoefficientEntry>,
    pub error_profile: Vec<ErrorRow>,
}

impl AsymReport {
    pub fn new(truncation: usize, approx: &BinetApproximation, profile: &ErrorProfile) -> Self {
        let eigenvalues = approx
            .eigenvalues()
            .iter()
            .map(|ev| EigenvalueEntry {
                lambda: pair(ev.lambda),
                z_root: pair(ev.z_root),
                multiplicity: ev.multiplicity,
                residual: ev.residual,
                drift: ev.drift,
            })
            .collect();
        let mut coefficients = Vec::new();
        for (i, ev) in approx.eigenvalues().iter().enumerate() {
            for j in 1..=ev.multiplicity {
                for alpha in 1..=approx.dim() {
                    coefficients.push(CoefficientEntry {
                        eigenvalue: i,
                        j,
                        alpha,
                        value: pair(approx.coefficient(i, j, alpha)),
                    });
                }
            }
        }
        let error_profile = profile
            .rows()
            .iter()
            .enumerate()
            .map(|(n, errors)| ErrorRow {
                n,
                errors: errors.clone(),
                max: profile.max_at(n),
            })
            .collect();
        AsymReport {
            truncation,
            eigenvalues,
            coefficients,
            error_profile,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompanionReport {
    pub lhs: Vec<Pair>,
    pub rhs: Vec<Pair>,
    pub max_abs_diff: f64,
}

impl From<&CompanionCheck> for CompanionReport {
    fn from(c: &CompanionCheck) -> Self {
        CompanionReport {
            lhs: series_pairs(&c.lhs),
            rhs: series_pairs(&c.rhs),
            max_abs_diff: c.max_abs_diff,
        }
    }
}

/// Shortest decimal that parses back to the same double.
pub fn number(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite floats serialize")
    } else {
        format!("{x}")
    }
}

pub fn solution_header(p: usize) -> String {
    let mut cols = vec!["n".to_string()];
    for alpha in 1..=p {
        cols.push(format!("v{alpha}_re"));
        cols.push(format!("v{alpha}_im"));
    }
    cols.join(",")
}

pub fn solution_row(n: usize, v: &CVector) -> String {
    let mut cols = vec![n.to_string()];
    for c in v.iter() {
        cols.push(number(c.re));
        cols.push(number(c.im));
    }
    cols.join(",")
}
