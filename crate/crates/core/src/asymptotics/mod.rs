//! Dominant generalized eigenvalues and asymptotic Binet formulas.
//!
//! A generalized eigenvalue `lambda` of multiplicity `m` is the reciprocal of
//! an `m`-fold zero of the kneading determinant `Delta`; it is dominant when
//! `|lambda| >= 1`. When the kneading matrix is holomorphic on a disk of
//! radius `rho > 1`, the only poles of `G_alpha(u) = numerator / Delta` in
//! the closed unit disk sit at these zeros, and the principal parts
//! `sum_j L(-j) (z - z_i)^{-j}` give the constants
//! `c_{i,j} = L(-j) (-lambda_i)^j` of
//!
//! ```text
//! v_n ~ sum_i sum_j c_{i,j} binom(n + j - 1, n) lambda_i^n.
//! ```

pub mod roots;

use num_complex::Complex64;
use thiserror::Error;

use crate::kneading::{KneadingError, KneadingSystem};
use crate::recurrence::{CVector, InitialCondition, ModelError, Order, Recurrence};
use crate::series::TruncatedSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error(transparent)]
    Kneading(#[from] KneadingError),
    #[error(
        "the Binet expansion needs a kneading matrix holomorphic on a disk of radius rho > 1, \
         but rho = {rho}"
    )]
    HypothesisViolated { rho: f64 },
    #[error("root {z_root} moved by {drift:e} between truncations {truncation} and {}", 2 * truncation)]
    TruncationUnstable {
        z_root: Complex64,
        drift: f64,
        truncation: usize,
    },
    #[error(
        "local expansion of Delta at {z_root} is inconsistent with multiplicity {multiplicity}"
    )]
    MultiplicityMismatch {
        z_root: Complex64,
        multiplicity: usize,
    },
}

impl From<ModelError> for AsymptoticsError {
    fn from(e: ModelError) -> Self {
        AsymptoticsError::Kneading(e.into())
    }
}

pub type Result<T, E = AsymptoticsError> = std::result::Result<T, E>;

/// Thresholds for the eigenvalue search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSearch {
    /// Roots `z` of `Delta` are kept when `|z| <= disk_radius + boundary_eps`.
    pub disk_radius: f64,
    pub boundary_eps: f64,
    /// Raw roots closer than `cluster_tol * (1 + |z|)` form one multiple root.
    pub cluster_tol: f64,
    /// Largest accepted root drift between truncations `N` and `2N`.
    pub stability_eps: f64,
    /// `|Delta^(j)(z)| < vanish_tol * scale` for `j < m`.
    pub vanish_tol: f64,
    /// `|Delta^(m)(z)| > nonvanish_tol * scale`.
    pub nonvanish_tol: f64,
}

impl Default for RootSearch {
    fn default() -> Self {
        RootSearch {
            disk_radius: 1.0,
            boundary_eps: 1e-8,
            cluster_tol: 1e-6,
            stability_eps: 1e-8,
            vanish_tol: 1e-6,
            nonvanish_tol: 1e-3,
        }
    }
}

impl RootSearch {
    /// Search every root of `Delta`, not only those in the unit disk.
    pub fn all_roots() -> Self {
        RootSearch {
            disk_radius: f64::INFINITY,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigenvalue {
    pub lambda: Complex64,
    pub z_root: Complex64,
    pub multiplicity: usize,
    /// `|Delta(z_root)|` at truncation `2N`.
    pub residual: f64,
    /// Distance between the roots refined at truncations `N` and `2N`.
    pub drift: f64,
}

/// Truncation polynomial of `Delta`, cut at degree `kp` for finite order
/// where every higher coefficient is rounding noise.
fn delta_polynomial(rec: &Recurrence, sys: &KneadingSystem) -> Vec<Complex64> {
    let coeffs = sys.delta().coeffs();
    let degree = match rec.order() {
        Order::Finite(k) => (k * rec.dim()).min(coeffs.len() - 1),
        Order::Infinite => coeffs.len() - 1,
    };
    coeffs[..=degree].to_vec()
}

fn nth_derivative(coeffs: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut s = TruncatedSeries::new(coeffs.to_vec());
    for _ in 0..order {
        s = s.derivative();
    }
    s.into_coeffs()
}

fn scale(coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Raw roots of the truncation polynomial of `Delta` at the system's
/// truncation, before clustering.
pub fn raw_delta_roots(sys: &KneadingSystem) -> Vec<Complex64> {
    roots::aberth(&delta_polynomial(sys.recurrence(), sys))
}

/// Dominant generalized eigenvalues, with the default thresholds.
pub fn dominant_eigenvalues(sys: &KneadingSystem) -> Result<Vec<GeneralizedEigenvalue>> {
    dominant_eigenvalues_with(sys, &RootSearch::default())
}

/// Zeros of `Delta` in `|z| <= disk_radius + boundary_eps`, clustered into
/// multiple roots, refined by Newton on `Delta^(m-1)` at truncations `N` and
/// `2N`, and checked for stability between the two.
pub fn dominant_eigenvalues_with(
    sys: &KneadingSystem,
    search: &RootSearch,
) -> Result<Vec<GeneralizedEigenvalue>> {
    let rec = sys.recurrence();
    if rec.rho() <= 1.0 {
        return Err(AsymptoticsError::HypothesisViolated { rho: rec.rho() });
    }
    let n = sys.truncation();
    let poly = delta_polynomial(rec, sys);
    let raw = roots::aberth(&poly);
    let clusters = roots::cluster(&raw, search.cluster_tol);

    let fine_sys = KneadingSystem::build(rec, 2 * n)?;
    let fine = delta_polynomial(rec, &fine_sys);
    let fine_scale = scale(&fine);
    let limit = search.disk_radius + search.boundary_eps;

    let mut out = Vec::new();
    for cl in clusters {
        let m = cl.multiplicity();
        let coarse_root = roots::newton_polish(&nth_derivative(&poly, m - 1), cl.center);
        if coarse_root.norm() > limit {
            continue;
        }
        let z = roots::newton_polish(&nth_derivative(&fine, m - 1), coarse_root);
        let drift = (z - coarse_root).norm();
        if drift > search.stability_eps {
            return Err(AsymptoticsError::TruncationUnstable {
                z_root: coarse_root,
                drift,
                truncation: n,
            });
        }
        for j in 0..m {
            let d = TruncatedSeries::new(nth_derivative(&fine, j)).eval(z);
            if d.norm() >= search.vanish_tol * fine_scale {
                return Err(AsymptoticsError::MultiplicityMismatch {
                    z_root: z,
                    multiplicity: m,
                });
            }
        }
        let dm = TruncatedSeries::new(nth_derivative(&fine, m)).eval(z);
        if dm.norm() <= search.nonvanish_tol * fine_scale {
            return Err(AsymptoticsError::MultiplicityMismatch {
                z_root: z,
                multiplicity: m,
            });
        }
        let residual = TruncatedSeries::new(fine.clone()).eval(z).norm();
        out.push(GeneralizedEigenvalue {
            lambda: z.inv(),
            z_root: z,
            multiplicity: m,
            residual,
            drift,
        });
    }
    out.sort_by(|a, b| {
        b.lambda
            .norm()
            .total_cmp(&a.lambda.norm())
            .then(a.lambda.arg().total_cmp(&b.lambda.arg()))
    });
    Ok(out)
}

/// `L(-1)..L(-m)` of `numerator / delta` at the pole `ev.z_root`, where
/// `result[j-1] = L(-j)`.
///
/// Both truncation polynomials are re-centred at the pole; `Delta` must start
/// with `m` vanishing local coefficients and the principal part follows by
/// dividing the local numerator by `(z - z_i)^{-m} Delta`.
pub fn principal_part(
    numerator: &TruncatedSeries,
    delta: &TruncatedSeries,
    ev: &GeneralizedEigenvalue,
) -> Result<Vec<Complex64>> {
    principal_part_with(numerator, delta, ev, &RootSearch::default())
}

fn principal_part_with(
    numerator: &TruncatedSeries,
    delta: &TruncatedSeries,
    ev: &GeneralizedEigenvalue,
    search: &RootSearch,
) -> Result<Vec<Complex64>> {
    let m = ev.multiplicity;
    let mismatch = AsymptoticsError::MultiplicityMismatch {
        z_root: ev.z_root,
        multiplicity: m,
    };
    let local_delta = delta.taylor_shift(ev.z_root);
    let local_num = numerator.taylor_shift(ev.z_root);
    let tol = search.vanish_tol * delta.scale();
    if (0..m).any(|j| local_delta.coeff(j).norm() >= tol) {
        return Err(mismatch);
    }
    let reduced = TruncatedSeries::from_fn(m - 1, |j| local_delta.coeff(j + m));
    let inv = reduced.invert().map_err(|_| mismatch)?;
    let local = TruncatedSeries::from_fn(m - 1, |j| local_num.coeff(j))
        .mul(&inv)
        .expect("equal truncations");
    Ok((1..=m).map(|j| local.coeff(m - j)).collect())
}

/// Principal part of `G_alpha(e_beta)` at a generalized eigenvalue.
pub fn laurent_principal_part(
    sys: &KneadingSystem,
    alpha: usize,
    beta: usize,
    ev: &GeneralizedEigenvalue,
) -> Result<Vec<Complex64>> {
    let num = sys.basis_numerator(alpha, beta)?;
    principal_part(&num, sys.delta(), ev)
}

/// Asymptotic closed form `v_n^(alpha) ~ sum c_{i,j} binom(n+j-1, n) lambda_i^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinetApproximation {
    dim: usize,
    eigenvalues: Vec<GeneralizedEigenvalue>,
    /// `coeffs[i][alpha - 1][j - 1] = c_{i,j}^(alpha)`
    coeffs: Vec<Vec<Vec<Complex64>>>,
}

impl BinetApproximation {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[GeneralizedEigenvalue] {
        &self.eigenvalues
    }

    /// `c_{i,j}^(alpha)` for the `i`-th eigenvalue in
    /// [`eigenvalues`](Self::eigenvalues) (zero-based), with one-based order
    /// `j` and component `alpha`.
    pub fn coefficient(&self, i: usize, j: usize, alpha: usize) -> Complex64 {
        self.coeffs[i][alpha - 1][j - 1]
    }

    /// The closed form at time `n`.
    pub fn evaluate(&self, n: usize) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for (ev, per_alpha) in self.eigenvalues.iter().zip(&self.coeffs) {
            let power = ev.lambda.powu(n as u32);
            let weights = binomial_weights(n, ev.multiplicity);
            for (alpha, cs) in per_alpha.iter().enumerate() {
                let s: Complex64 = cs.iter().zip(&weights).map(|(c, w)| c * w).sum();
                out[alpha] += s * power;
            }
        }
        out
    }
}

/// `binom(n + j - 1, n)` for `j = 1..=m`, built as running products.
fn binomial_weights(n: usize, m: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(m);
    let mut acc = 1.0;
    for j in 1..=m {
        if j > 1 {
            acc *= (n + j - 1) as f64 / (j - 1) as f64;
        }
        w.push(acc);
    }
    w
}

/// `binom(n + j - 1, n)`; exposed for checking the weight arithmetic.
pub fn binomial_weight(n: usize, j: usize) -> f64 {
    binomial_weights(n, j)[j - 1]
}

/// Constants `c_{i,j}^(alpha)(u) = L(i,-j) (-lambda_i)^j` for every
/// component, from the principal parts of `G_alpha(u)`.
pub fn binet_coefficients(
    sys: &KneadingSystem,
    u: &InitialCondition,
    eigenvalues: &[GeneralizedEigenvalue],
) -> Result<BinetApproximation> {
    let p = sys.recurrence().dim();
    let numerators = (1..=p)
        .map(|alpha| sys.numerator(u, alpha))
        .collect::<Result<Vec<_>, _>>()?;
    let mut coeffs = Vec::with_capacity(eigenvalues.len());
    for ev in eigenvalues {
        let mut per_alpha = Vec::with_capacity(p);
        for num in &numerators {
            let laurent = principal_part(num, sys.delta(), ev)?;
            let neg_lambda = -ev.lambda;
            per_alpha.push(
                laurent
                    .iter()
                    .enumerate()
                    .map(|(k, l)| l * neg_lambda.powu(k as u32 + 1))
                    .collect(),
            );
        }
        coeffs.push(per_alpha);
    }
    Ok(BinetApproximation {
        dim: p,
        eigenvalues: eigenvalues.to_vec(),
        coeffs,
    })
}

/// Componentwise `|v_n - v^_n|` for `n = 0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    rows: Vec<Vec<f64>>,
}

impl ErrorProfile {
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Largest component error at time `n`.
    pub fn max_at(&self, n: usize) -> f64 {
        self.rows[n].iter().copied().fold(0.0, f64::max)
    }
}

/// Deviation of the Binet closed form from direct iteration.
pub fn asymptotic_error_profile(
    rec: &Recurrence,
    u: &InitialCondition,
    approx: &BinetApproximation,
    horizon: usize,
) -> Result<ErrorProfile> {
    let sol = rec.iterate(u, horizon)?;
    let rows = (0..=horizon)
        .map(|n| {
            let diff = sol.get(n) - approx.evaluate(n);
            diff.iter().map(|d| d.norm()).collect()
        })
        .collect();
    Ok(ErrorProfile { rows })
}
