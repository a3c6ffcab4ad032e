//! JSON input schema.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::recurrence::{
    CMatrix, CVector, CoefficientProvider, InitialCondition, Recurrence, Term,
};

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

/// A matrix as a list of rows of complex pairs.
pub type MatrixDoc = Vec<Vec<Pair>>;

pub const DEFAULT_TRUNCATION: usize = 64;

fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}

/// `[re, im]`, with negative zeros written as zeros.
pub fn pair(c: Complex64) -> Pair {
    [c.re + 0.0, c.im + 0.0]
}

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceDocument {
    pub p: usize,
    pub coefficients: CoefficientsDoc,
    pub initial: Vec<InitialEntry>,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientsDoc {
    Explicit {
        matrices: Vec<MatrixDoc>,
    },
    Periodic {
        #[serde(default)]
        preamble: Vec<MatrixDoc>,
        cycle: Vec<MatrixDoc>,
    },
    /// `p x p` grid of term lists.
    ClosedForm {
        entries: Vec<Vec<Vec<TermDoc>>>,
    },
}

/// `c * r^n * n^a`, divided by `(n + b)!` when `factorial` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub c: Pair,
    pub r: Pair,
    #[serde(default)]
    pub a: u32,
    #[serde(default)]
    pub b: u32,
    #[serde(default)]
    pub factorial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialEntry {
    pub index: usize,
    pub vector: Vec<Pair>,
}

/// A document that parsed and passed validation.
#[derive(Debug, Clone)]
pub struct Problem {
    pub recurrence: Recurrence,
    pub initial: InitialCondition,
    pub truncation: usize,
}

impl RecurrenceDocument {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid document: {e}"))
    }

    /// Checks shapes and builds the model. Every error here is a schema error.
    pub fn validate(&self) -> Result<Problem, String> {
        let p = self.p;
        if p == 0 {
            return Err("p must be positive".into());
        }
        if self.truncation == 0 {
            return Err("truncation must be positive".into());
        }
        let matrices = |list: &[MatrixDoc], what: &str| {
            list.iter()
                .enumerate()
                .map(|(n, m)| matrix(m, p).map_err(|e| format!("{what}[{n}]: {e}")))
                .collect::<Result<Vec<_>, _>>()
        };
        let provider = match &self.coefficients {
            CoefficientsDoc::Explicit { matrices: ms } => {
                CoefficientProvider::Explicit(matrices(ms, "matrices")?)
            }
            CoefficientsDoc::Periodic { preamble, cycle } => CoefficientProvider::Periodic {
                preamble: matrices(preamble, "preamble")?,
                cycle: matrices(cycle, "cycle")?,
            },
            CoefficientsDoc::ClosedForm { entries } => {
                if entries.len() != p || entries.iter().any(|row| row.len() != p) {
                    return Err(format!("closed_form entries must form a {p} x {p} grid"));
                }
                CoefficientProvider::ClosedForm {
                    dim: p,
                    entries: entries
                        .iter()
                        .flatten()
                        .map(|cell| cell.iter().map(term).collect())
                        .collect(),
                }
            }
        };
        let recurrence = Recurrence::new(provider).map_err(|e| e.to_string())?;

        let mut initial = InitialCondition::zero(p);
        let mut seen = BTreeSet::new();
        for entry in &self.initial {
            if !seen.insert(entry.index) {
                return Err(format!("initial index {} appears twice", entry.index));
            }
            if entry.vector.len() != p {
                return Err(format!(
                    "initial vector at index {} has length {}, expected {p}",
                    entry.index,
                    entry.vector.len()
                ));
            }
            let v = CVector::from_iterator(p, entry.vector.iter().copied().map(complex));
            initial.insert(entry.index, v).map_err(|e| e.to_string())?;
        }
        Ok(Problem {
            recurrence,
            initial,
            truncation: self.truncation,
        })
    }
}

fn matrix(m: &MatrixDoc, p: usize) -> Result<CMatrix, String> {
    if m.len() != p || m.iter().any(|row| row.len() != p) {
        return Err(format!("expected a {p} x {p} matrix"));
    }
    Ok(CMatrix::from_fn(p, p, |i, j| complex(m[i][j])))
}

fn term(t: &TermDoc) -> Term {
    Term {
        coeff: complex(t.c),
        ratio: complex(t.r),
        power: t.a,
        shift: t.b,
        factorial: t.factorial,
    }
}
