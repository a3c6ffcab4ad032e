use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ModelError;

pub type CMatrix = DMatrix<Complex64>;

/// One summand `coeff * ratio^n * n^power`, divided by `(n + shift)!` when
/// `factorial` is set. `0^0` is taken as 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub ratio: Complex64,
    pub power: u32,
    pub shift: u32,
    pub factorial: bool,
}

impl Term {
    /// `coeff * ratio^n / (n + shift)!`
    pub fn factorial(coeff: Complex64, ratio: Complex64, shift: u32) -> Self {
        Term {
            coeff,
            ratio,
            power: 0,
            shift,
            factorial: true,
        }
    }

    /// `coeff * ratio^n`
    pub fn geometric(coeff: Complex64, ratio: Complex64) -> Self {
        Term {
            coeff,
            ratio,
            power: 0,
            shift: 0,
            factorial: false,
        }
    }

    pub fn value_at(&self, n: usize) -> Complex64 {
        let poly = if self.power == 0 {
            1.0
        } else {
            (n as f64).powi(self.power as i32)
        };
        let geometric = if self.factorial {
            // ratio^n / (n+shift)!, accumulated so neither factor overflows
            let mut acc = Complex64::new(1.0, 0.0);
            for k in 1..=self.shift as usize {
                acc /= k as f64;
            }
            for k in 1..=n {
                acc *= self.ratio / (self.shift as usize + k) as f64;
            }
            acc
        } else {
            self.ratio.powu(n as u32)
        };
        self.coeff * geometric * poly
    }
}

/// Rule producing the `p x p` coefficient matrix `A_n` for every `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientProvider {
    /// `A_0..A_{k-1}`, zero afterwards.
    Explicit(Vec<CMatrix>),
    /// `preamble` first, then `cycle` repeated forever.
    Periodic {
        preamble: Vec<CMatrix>,
        cycle: Vec<CMatrix>,
    },
    /// A `p x p` grid (row-major) of term lists summed entrywise.
    ClosedForm { dim: usize, entries: Vec<Vec<Term>> },
}

fn is_zero_matrix(m: &CMatrix) -> bool {
    m.iter().all(|c| c.re == 0.0 && c.im == 0.0)
}

fn check_square(list: &[CMatrix], dim: usize) -> Result<(), ModelError> {
    for m in list {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(ModelError::DimensionMismatch {
                expected: dim,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
    }
    Ok(())
}

impl CoefficientProvider {
    /// Checks the variant invariants and returns the dimension `p`.
    pub fn validate(&self) -> Result<usize, ModelError> {
        match self {
            CoefficientProvider::Explicit(list) => {
                let last = list.last().ok_or(ModelError::EmptyExplicit)?;
                let dim = last.nrows();
                if dim == 0 {
                    return Err(ModelError::ZeroDimension);
                }
                check_square(list, dim)?;
                // a lone zero matrix is the zero recurrence
                if list.len() > 1 && is_zero_matrix(last) {
                    return Err(ModelError::LooseOrder { order: list.len() });
                }
                Ok(dim)
            }
            CoefficientProvider::Periodic { preamble, cycle } => {
                let first = cycle.first().ok_or(ModelError::EmptyCycle)?;
                let dim = first.nrows();
                if dim == 0 {
                    return Err(ModelError::ZeroDimension);
                }
                check_square(preamble, dim)?;
                check_square(cycle, dim)?;
                Ok(dim)
            }
            CoefficientProvider::ClosedForm { dim, entries } => {
                if *dim == 0 {
                    return Err(ModelError::ZeroDimension);
                }
                if entries.len() != dim * dim {
                    return Err(ModelError::GridShape {
                        dim: *dim,
                        got: entries.len(),
                    });
                }
                Ok(*dim)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            CoefficientProvider::Explicit(list) => list.first().map_or(0, |m| m.nrows()),
            CoefficientProvider::Periodic { cycle, .. } => cycle.first().map_or(0, |m| m.nrows()),
            CoefficientProvider::ClosedForm { dim, .. } => *dim,
        }
    }

    /// `A_n`.
    pub fn matrix_at(&self, n: usize) -> CMatrix {
        let p = self.dim();
        match self {
            CoefficientProvider::Explicit(list) => {
                list.get(n).cloned().unwrap_or_else(|| CMatrix::zeros(p, p))
            }
            CoefficientProvider::Periodic { preamble, cycle } => {
                if n < preamble.len() {
                    preamble[n].clone()
                } else {
                    cycle[(n - preamble.len()) % cycle.len()].clone()
                }
            }
            CoefficientProvider::ClosedForm { dim, .. } => {
                CMatrix::from_fn(*dim, *dim, |i, j| self.entry_at(i, j, n))
            }
        }
    }

    /// Entry `(i, j)` of `A_n`, zero-based.
    pub fn entry_at(&self, i: usize, j: usize, n: usize) -> Complex64 {
        match self {
            CoefficientProvider::ClosedForm { dim, entries } => {
                entries[i * dim + j].iter().map(|t| t.value_at(n)).sum()
            }
            _ => self.matrix_at(n)[(i, j)],
        }
    }

    /// Estimated radius of the disk on which every entry series converges.
    pub(crate) fn holomorphy_radius(&self) -> f64 {
        match self {
            CoefficientProvider::Explicit(_) => f64::INFINITY,
            CoefficientProvider::Periodic { cycle, .. } => {
                if cycle.iter().all(is_zero_matrix) {
                    f64::INFINITY
                } else {
                    1.0
                }
            }
            CoefficientProvider::ClosedForm { entries, .. } => {
                let max_ratio = entries
                    .iter()
                    .flatten()
                    .filter(|t| !t.factorial && t.coeff.norm() > 0.0)
                    .map(|t| t.ratio.norm())
                    .fold(0.0, f64::max);
                if max_ratio == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / max_ratio
                }
            }
        }
    }
}
