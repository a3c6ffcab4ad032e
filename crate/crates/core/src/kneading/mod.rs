//! Kneading matrices, kneading determinants and generating functions of
//! solutions.
//!
//! For a recurrence with coefficient matrices `A_n`, the kneading matrix is
//! `K(i,j) = sum_n A_n(i,j) z^n` and the kneading determinant is
//! `Delta = det(I - zK)`. Appending a tail-shifted coefficient column and a
//! Kronecker row gives the extended matrices `K_alpha(beta)`, whose
//! determinants `Delta_alpha(beta)` determine the generating function of the
//! solution started from the basis vector `e_beta`:
//!
//! ```text
//! z G_alpha(e_beta) = 1 - Delta^{-1} Delta_alpha(beta)
//! ```
//!
//! Components `alpha` and basis indices `beta` are one-based throughout.

use num_complex::Complex64;
use thiserror::Error;

use crate::recurrence::{CVector, InitialCondition, ModelError, Order, Recurrence};
use crate::series::{SeriesError, SeriesMatrix, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KneadingError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("component alpha = {alpha} is outside 1..={p}")]
    InvalidAlpha { alpha: usize, p: usize },
    #[error("basis index beta must be at least 1")]
    InvalidBeta,
    #[error("truncation must be at least 1")]
    ZeroTruncation,
}

pub type Result<T, E = KneadingError> = std::result::Result<T, E>;

/// Kneading matrix and determinant of a recurrence at a fixed truncation.
#[derive(Debug, Clone)]
pub struct KneadingSystem {
    rec: Recurrence,
    truncation: usize,
    kneading: SeriesMatrix,
    delta: TruncatedSeries,
}

impl KneadingSystem {
    /// Evaluates `A_0..=A_N` into `K` and computes `Delta = det(I - zK)`.
    pub fn build(rec: &Recurrence, truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(KneadingError::ZeroTruncation);
        }
        let p = rec.dim();
        let mats: Vec<_> = (0..=truncation).map(|n| rec.matrix_at(n)).collect();
        let kneading = SeriesMatrix::from_fn(p, p, |i, j| {
            TruncatedSeries::from_fn(truncation, |n| mats[n][(i, j)])
        })?;
        let delta = kneading.identity_minus_z()?.determinant()?;
        Ok(KneadingSystem {
            rec: rec.clone(),
            truncation,
            kneading,
            delta,
        })
    }

    pub fn recurrence(&self) -> &Recurrence {
        &self.rec
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn kneading_matrix(&self) -> &SeriesMatrix {
        &self.kneading
    }

    /// The kneading determinant `Delta`.
    pub fn delta(&self) -> &TruncatedSeries {
        &self.delta
    }

    fn check_indices(&self, alpha: usize, beta: usize) -> Result<()> {
        let p = self.rec.dim();
        if alpha == 0 || alpha > p {
            return Err(KneadingError::InvalidAlpha { alpha, p });
        }
        if beta == 0 {
            return Err(KneadingError::InvalidBeta);
        }
        Ok(())
    }

    /// The extra column `K(i, beta)`, zero-based in `i`.
    ///
    /// With `beta = q p + r`: if `p | beta` the column is
    /// `sum_n A_{n+q-1}(i,p) z^n`, otherwise `sum_n A_{n+q}(i,r) z^n`.
    fn beta_column(&self, beta: usize) -> Vec<TruncatedSeries> {
        let p = self.rec.dim();
        let (q, r) = (beta / p, beta % p);
        let (offset, col) = if r == 0 { (q - 1, p - 1) } else { (q, r - 1) };
        let provider = self.rec.provider();
        (0..p)
            .map(|i| {
                TruncatedSeries::from_fn(self.truncation, |n| provider.entry_at(i, col, n + offset))
            })
            .collect()
    }

    /// The `(p+1) x (p+1)` extended kneading matrix `K_alpha(beta)`.
    pub fn extended_kneading_matrix(&self, alpha: usize, beta: usize) -> Result<SeriesMatrix> {
        self.check_indices(alpha, beta)?;
        let p = self.rec.dim();
        let n = self.truncation;
        let column = self.beta_column(beta);
        let delta_entry = |k: usize| {
            if k == alpha {
                TruncatedSeries::one(n)
            } else {
                TruncatedSeries::zero(n)
            }
        };
        Ok(SeriesMatrix::from_fn(p + 1, p + 1, |i, j| {
            match (i < p, j < p) {
                (true, true) => self.kneading.get(i, j).clone(),
                (true, false) => column[i].clone(),
                (false, true) => delta_entry(j + 1),
                (false, false) => delta_entry(beta),
            }
        })?)
    }

    /// `Delta_alpha(beta) = det(I - z K_alpha(beta))`.
    pub fn extended_determinant(&self, alpha: usize, beta: usize) -> Result<TruncatedSeries> {
        Ok(self
            .extended_kneading_matrix(alpha, beta)?
            .identity_minus_z()?
            .determinant()?)
    }

    /// `G_alpha(e_beta) = (1 - Delta^{-1} Delta_alpha(beta)) / z` at
    /// truncation `N - 1`.
    ///
    /// Evaluated as `((Delta - Delta_alpha(beta)) / z) * Delta^{-1}`, which
    /// is the same series but cancels the leading term before the inverse
    /// enters.
    pub fn generating_function_basis(&self, alpha: usize, beta: usize) -> Result<TruncatedSeries> {
        let num = self.basis_numerator(alpha, beta)?;
        let inv = self.delta.truncated(self.truncation - 1).invert()?;
        Ok(num.mul(&inv)?)
    }

    /// `(Delta - Delta_alpha(beta)) / z`, the numerator of
    /// `G_alpha(e_beta) = numerator / Delta`, at truncation `N - 1`.
    pub fn basis_numerator(&self, alpha: usize, beta: usize) -> Result<TruncatedSeries> {
        let ext = self.extended_determinant(alpha, beta)?;
        Ok(self.delta.sub(&ext)?.shift_div_z()?)
    }

    /// Numerator of `G_alpha(u)` over `Delta`, by linearity in `u`.
    pub fn numerator(&self, u: &InitialCondition, alpha: usize) -> Result<TruncatedSeries> {
        self.check_dim(u)?;
        let mut acc = TruncatedSeries::zero(self.truncation - 1);
        for (beta, c) in u.basis_coordinates() {
            acc = acc.add(&self.basis_numerator(alpha, beta)?.scaled(c))?;
        }
        Ok(acc)
    }

    fn check_dim(&self, u: &InitialCondition) -> Result<()> {
        if u.dim() != self.rec.dim() {
            return Err(ModelError::VectorLength {
                expected: self.rec.dim(),
                got: u.dim(),
            }
            .into());
        }
        Ok(())
    }

    /// `G(u) = sum_beta c_beta G(e_beta)` over the nonzero coordinates of `u`.
    pub fn generating_function(&self, u: &InitialCondition) -> Result<GeneratingFunction> {
        self.check_dim(u)?;
        let p = self.rec.dim();
        let coords = u.basis_coordinates();
        let mut components = vec![TruncatedSeries::zero(self.truncation - 1); p];
        for (&beta, &c) in &coords {
            for (alpha, comp) in components.iter_mut().enumerate() {
                let g = self.generating_function_basis(alpha + 1, beta)?;
                *comp = comp.add(&g.scaled(c))?;
            }
        }
        Ok(GeneratingFunction { components })
    }
}

/// Per-component generating functions `G_1(u)..G_p(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingFunction {
    components: Vec<TruncatedSeries>,
}

impl GeneratingFunction {
    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    /// `G_alpha`, one-based.
    pub fn component(&self, alpha: usize) -> &TruncatedSeries {
        &self.components[alpha - 1]
    }

    pub fn truncation(&self) -> usize {
        self.components[0].truncation()
    }

    /// The vector `v_n` read off the coefficients of `z^n`.
    pub fn coefficient(&self, n: usize) -> CVector {
        CVector::from_iterator(
            self.components.len(),
            self.components.iter().map(|s| s.coeff(n)),
        )
    }
}

/// Both sides of `det(I - zF) = det(I - zK)` for a finite-order recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionCheck {
    pub lhs: TruncatedSeries,
    pub rhs: TruncatedSeries,
    pub max_abs_diff: f64,
}

/// Compares the discriminant of the companion matrix with the kneading
/// determinant at truncation `kp`. The left side goes through series
/// elimination, the right side through the division-free determinant.
pub fn companion_check(rec: &Recurrence) -> Result<CompanionCheck> {
    let Order::Finite(k) = rec.order() else {
        return Err(ModelError::InfiniteOrder.into());
    };
    let size = k * rec.dim();
    let f = rec.companion_matrix()?;
    let lhs = SeriesMatrix::from_constant(&f, size)
        .identity_minus_z()?
        .determinant_lu()?;
    let rhs = KneadingSystem::build(rec, size)?.delta;
    let max_abs_diff = lhs.max_abs_diff(&rhs);
    Ok(CompanionCheck {
        lhs,
        rhs,
        max_abs_diff,
    })
}

/// Coefficient-zero residual of `1 - Delta^{-1} Delta_alpha(beta)` before the
/// division by `z`; pure rounding when the identity holds.
pub fn cancellation_residual(sys: &KneadingSystem, alpha: usize, beta: usize) -> Result<f64> {
    let ext = sys.extended_determinant(alpha, beta)?;
    let ratio = sys.delta.invert()?.mul(&ext)?;
    let c0 = Complex64::new(1.0, 0.0) - ratio.coeff(0);
    Ok(c0.norm())
}
