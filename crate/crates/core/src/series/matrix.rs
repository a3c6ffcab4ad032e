use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Result, SeriesError, TruncatedSeries, INVERT_EPS};

/// Dense matrix of truncated series sharing one truncation, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TruncatedSeries>,
}

impl SeriesMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<TruncatedSeries>) -> Result<Self> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(SeriesError::ShapeMismatch {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        let n = entries[0].truncation();
        if let Some(bad) = entries.iter().find(|e| e.truncation() != n) {
            return Err(SeriesError::TruncationMismatch {
                left: n,
                right: bad.truncation(),
            });
        }
        Ok(SeriesMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds the matrix from `f(i, j)` with zero-based indices.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> TruncatedSeries,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn identity(size: usize, truncation: usize) -> Self {
        Self::from_fn(size, size, |i, j| {
            if i == j {
                TruncatedSeries::one(truncation)
            } else {
                TruncatedSeries::zero(truncation)
            }
        })
        .expect("identity has a valid shape")
    }

    /// Embeds a constant matrix as series with zero higher coefficients.
    pub fn from_constant(m: &DMatrix<Complex64>, truncation: usize) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| {
            TruncatedSeries::constant(m[(i, j)], truncation)
        })
        .expect("a DMatrix has a valid shape")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn truncation(&self) -> usize {
        self.entries[0].truncation()
    }

    /// Entry at zero-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[TruncatedSeries] {
        &self.entries
    }

    /// `I - z * self`, for a square matrix.
    pub fn identity_minus_z(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(SeriesError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.truncation();
        Self::from_fn(self.rows, self.cols, |i, j| {
            let zm = self.get(i, j).mul_z().neg();
            if i == j {
                zm.add(&TruncatedSeries::one(n)).expect("same truncation")
            } else {
                zm
            }
        })
    }

    /// Division-free determinant (Berkowitz).
    ///
    /// Builds the characteristic polynomial of each leading principal
    /// submatrix from the previous one with a Toeplitz product, using only
    /// ring additions and multiplications. No entry is ever inverted, so
    /// rounding stays proportional to the size of the products involved,
    /// even when elimination pivots would have rapidly growing inverses.
    pub fn determinant(&self) -> Result<TruncatedSeries> {
        if self.rows != self.cols {
            return Err(SeriesError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let t = self.truncation();
        let zero = TruncatedSeries::zero(t);
        let dot = |row: usize, v: &[TruncatedSeries]| {
            v.iter().enumerate().fold(zero.clone(), |acc, (j, vj)| {
                let mut acc = acc;
                acc.add_assign_product(self.get(row, j), vj);
                acc
            })
        };
        // monic characteristic polynomial of the leading r x r block,
        // highest degree first
        let mut charpoly = vec![TruncatedSeries::one(t)];
        for r in 1..=n {
            let last = r - 1;
            let mut toeplitz = Vec::with_capacity(r + 1);
            toeplitz.push(TruncatedSeries::one(t));
            toeplitz.push(self.get(last, last).neg());
            let mut v: Vec<TruncatedSeries> =
                (0..last).map(|i| self.get(i, last).clone()).collect();
            for step in 0..last {
                toeplitz.push(dot(last, &v).neg());
                if step + 1 < last {
                    v = (0..last).map(|i| dot(i, &v)).collect();
                }
            }
            let mut next = vec![zero.clone(); r + 1];
            for (i, out) in next.iter_mut().enumerate() {
                for (j, pj) in charpoly.iter().enumerate().take(i + 1) {
                    out.add_assign_product(&toeplitz[i - j], pj);
                }
            }
            charpoly = next;
        }
        let det = charpoly.pop().expect("non-empty");
        Ok(if n % 2 == 1 { det.neg() } else { det })
    }

    /// Determinant by Gaussian elimination without pivoting.
    ///
    /// Every leading pivot must have an invertible constant term, which holds
    /// whenever the matrix has the form `I - z*M`. Anything else fails with
    /// [`SeriesError::PivotNotInvertible`] and needs to be permuted first.
    ///
    /// Pivots are ratios of minors and their inverses can grow quickly, so
    /// a pivot is judged by its constant term against the constant terms of
    /// the input. The same growth costs absolute accuracy in the high
    /// coefficients; [`determinant`](Self::determinant) does not have it.
    pub fn determinant_lu(&self) -> Result<TruncatedSeries> {
        if self.rows != self.cols {
            return Err(SeriesError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let size = self.rows;
        let mut m = self.entries.clone();
        let constant_scale = self
            .entries
            .iter()
            .map(|e| e.coeff(0).norm())
            .fold(0.0, f64::max);
        let threshold = INVERT_EPS * constant_scale;
        let mut det = TruncatedSeries::one(self.truncation());
        for k in 0..size {
            let pivot = m[k * size + k].clone();
            let c0 = pivot.coeff(0).norm();
            if c0 <= threshold || c0 == 0.0 {
                return Err(SeriesError::PivotNotInvertible { step: k });
            }
            let inv = pivot.invert_unchecked();
            det = det.mul_unchecked(&pivot);
            for i in k + 1..size {
                let factor = m[i * size + k].mul_unchecked(&inv);
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..size {
                    let update = factor.mul_unchecked(&m[k * size + j]);
                    m[i * size + j] = m[i * size + j].sub_unchecked(&update);
                }
            }
        }
        Ok(det)
    }
}
