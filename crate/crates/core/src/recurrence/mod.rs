//! Recurrences `x_{n+1} = sum_{i>=0} A_i x_{n-i}` on `C^p` with finitely
//! supported pre-history.
//!
//! Initial conditions follow the convention `v_{-n} = u_n`: `u_0` is the
//! value at time 0 and `u_m` for `m > 0` is the value `m` steps before it.

mod provider;

pub use provider::{CMatrix, CoefficientProvider, Term};

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

pub type CVector = DVector<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("explicit provider needs at least one matrix")]
    EmptyExplicit,
    #[error("last explicit matrix A_{} is zero, so the order is not {order}", order - 1)]
    LooseOrder { order: usize },
    #[error("periodic provider needs a non-empty cycle")]
    EmptyCycle,
    #[error("dimension p must be positive")]
    ZeroDimension,
    #[error("expected {expected}x{expected} matrix, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("closed form grid for p = {dim} needs {} entries, got {got}", dim * dim)]
    GridShape { dim: usize, got: usize },
    #[error("vector of length {got} does not match p = {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("the recurrence has infinite order")]
    InfiniteOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Finite(usize),
    Infinite,
}

/// A `Fib_p` recurrence: dimension, coefficient rule, order and the radius of
/// the disk where its kneading matrix is holomorphic.
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence {
    dim: usize,
    provider: CoefficientProvider,
    order: Order,
    rho: f64,
}

impl Recurrence {
    pub fn new(provider: CoefficientProvider) -> Result<Self, ModelError> {
        let dim = provider.validate()?;
        let order = match &provider {
            CoefficientProvider::Explicit(list) => Order::Finite(list.len()),
            _ => Order::Infinite,
        };
        let rho = provider.holomorphy_radius();
        Ok(Recurrence {
            dim,
            provider,
            order,
            rho,
        })
    }

    /// Convenience constructor for an explicit finite-order recurrence.
    pub fn explicit(matrices: Vec<CMatrix>) -> Result<Self, ModelError> {
        Self::new(CoefficientProvider::Explicit(matrices))
    }

    /// Scalar recurrence `x_{n+1} = sum a_i x_{n-i}` with real coefficients.
    pub fn scalar(coeffs: &[f64]) -> Result<Self, ModelError> {
        Self::explicit(
            coeffs
                .iter()
                .map(|&a| CMatrix::from_element(1, 1, Complex64::new(a, 0.0)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provider(&self) -> &CoefficientProvider {
        &self.provider
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// Estimated holomorphy radius; `f64::INFINITY` for entire kneading
    /// matrices.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn matrix_at(&self, n: usize) -> CMatrix {
        self.provider.matrix_at(n)
    }

    /// Direct iteration of the recurrence for `v_0..=v_horizon`.
    ///
    /// With `M` the largest supported index of `u`, every step is the finite
    /// sum `v_{n+1} = sum_{i=0..n+M} A_i v_{n-i}`.
    pub fn iterate(
        &self,
        u: &InitialCondition,
        horizon: usize,
    ) -> Result<SolutionPrefix, ModelError> {
        u.check_dim(self.dim)?;
        let p = self.dim;
        let Some(depth) = u.max_index() else {
            return Ok(SolutionPrefix {
                vectors: vec![CVector::zeros(p); horizon + 1],
            });
        };
        // history[t + depth] = v_t for t >= -depth
        let mut history: Vec<CVector> = (0..=depth).rev().map(|m| u.get(m)).collect();
        let max_lag = match self.order {
            Order::Finite(k) => k,
            Order::Infinite => horizon + depth,
        };
        let coeffs: Vec<CMatrix> = (0..max_lag.min(horizon + depth))
            .map(|i| self.matrix_at(i))
            .collect();
        for n in 0..horizon {
            let mut next = CVector::zeros(p);
            let now = n + depth;
            for (i, a) in coeffs.iter().enumerate().take(now + 1) {
                next += a * &history[now - i];
            }
            history.push(next);
        }
        Ok(SolutionPrefix {
            vectors: history.split_off(depth),
        })
    }

    /// The `kp x kp` Frobenius companion matrix of a finite-order recurrence.
    pub fn companion_matrix(&self) -> Result<CMatrix, ModelError> {
        let Order::Finite(k) = self.order else {
            return Err(ModelError::InfiniteOrder);
        };
        let p = self.dim;
        let mut f = CMatrix::zeros(k * p, k * p);
        for b in 0..k {
            f.view_mut((0, b * p), (p, p)).copy_from(&self.matrix_at(b));
        }
        for b in 1..k {
            for d in 0..p {
                f[(b * p + d, (b - 1) * p + d)] = Complex64::new(1.0, 0.0);
            }
        }
        Ok(f)
    }
}

/// Position `n` and one-based component `j` of the basis vector `e_beta`.
pub fn beta_decode(beta: usize, p: usize) -> (usize, usize) {
    assert!(beta >= 1 && p >= 1, "beta and p are one-based");
    let n = beta.div_ceil(p) - 1;
    (n, beta - n * p)
}

/// Finitely supported initial condition `u = (u_0, u_1, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    dim: usize,
    support: BTreeMap<usize, CVector>,
}

impl InitialCondition {
    pub fn zero(p: usize) -> Self {
        InitialCondition {
            dim: p,
            support: BTreeMap::new(),
        }
    }

    /// The standard basis vector `e_beta` of the space of initial conditions.
    pub fn basis(p: usize, beta: usize) -> Self {
        let (n, j) = beta_decode(beta, p);
        let mut v = CVector::zeros(p);
        v[j - 1] = Complex64::new(1.0, 0.0);
        let mut u = Self::zero(p);
        u.support.insert(n, v);
        u
    }

    /// Sets `u_n`; replaces any previous value at `n`.
    pub fn insert(&mut self, n: usize, value: CVector) -> Result<(), ModelError> {
        if value.len() != self.dim {
            return Err(ModelError::VectorLength {
                expected: self.dim,
                got: value.len(),
            });
        }
        self.support.insert(n, value);
        Ok(())
    }

    pub fn with(mut self, n: usize, value: CVector) -> Result<Self, ModelError> {
        self.insert(n, value)?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `u_n`, zero off the support.
    pub fn get(&self, n: usize) -> CVector {
        self.support
            .get(&n)
            .cloned()
            .unwrap_or_else(|| CVector::zeros(self.dim))
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &CVector)> {
        self.support.iter().map(|(&n, v)| (n, v))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.support.keys().next_back().copied()
    }

    fn check_dim(&self, p: usize) -> Result<(), ModelError> {
        if self.dim == p {
            Ok(())
        } else {
            Err(ModelError::VectorLength {
                expected: p,
                got: self.dim,
            })
        }
    }

    /// Nonzero coordinates `c_beta` with respect to the basis `e_beta`.
    pub fn basis_coordinates(&self) -> BTreeMap<usize, Complex64> {
        let p = self.dim;
        let mut out = BTreeMap::new();
        for (&n, v) in &self.support {
            for (j, &c) in v.iter().enumerate() {
                if c.re != 0.0 || c.im != 0.0 {
                    out.insert(n * p + j + 1, c);
                }
            }
        }
        out
    }
}

/// `v_0..=v_H` of one solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPrefix {
    vectors: Vec<CVector>,
}

impl SolutionPrefix {
    pub fn horizon(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn get(&self, n: usize) -> &CVector {
        &self.vectors[n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn fibonacci() -> Recurrence {
        Recurrence::scalar(&[1., 1.]).unwrap()
    }

    fn unit_circle_pair() -> Recurrence {
        let m = |v: [f64; 4]| CMatrix::from_row_slice(2, 2, &v.map(c));
        Recurrence::explicit(vec![
            m([1., 1., 1., 1.]),
            m([-1., -1., -1., -1.]),
            m([0., 1., 1., 0.]),
        ])
        .unwrap()
    }

    fn random_c(rng: &mut impl Rng) -> Complex64 {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn random_recurrence(rng: &mut impl Rng) -> Recurrence {
        let p = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=4);
        let mats = (0..k)
            .map(|_| CMatrix::from_fn(p, p, |_, _| random_c(rng)))
            .collect();
        Recurrence::explicit(mats).unwrap()
    }

    fn random_condition(rng: &mut impl Rng, p: usize) -> InitialCondition {
        let mut u = InitialCondition::zero(p);
        for n in 0..rng.gen_range(0..4) {
            u.insert(n, CVector::from_fn(p, |_, _| random_c(rng)))
                .unwrap();
        }
        u
    }

    #[test]
    fn fibonacci_iteration() {
        let u = InitialCondition::basis(1, 1);
        let sol = fibonacci().iterate(&u, 5).unwrap();
        let vals: Vec<f64> = sol.vectors().iter().map(|v| v[0].re).collect();
        assert_eq!(vals, vec![1., 1., 2., 3., 5., 8.]);
    }

    #[test]
    fn zero_condition_gives_zero_solution() {
        let sol = unit_circle_pair()
            .iterate(&InitialCondition::zero(2), 10)
            .unwrap();
        assert_eq!(sol.horizon(), 10);
        assert!(sol
            .vectors()
            .iter()
            .all(|v| v.iter().all(|x| x.norm() == 0.0)));
    }

    #[test]
    fn prehistory_value_is_used() {
        // v_{-1} = 1, v_0 = 1: 1, 2, 3, 5, 8
        let u = InitialCondition::zero(1)
            .with(0, CVector::from_element(1, c(1.)))
            .unwrap()
            .with(1, CVector::from_element(1, c(1.)))
            .unwrap();
        let sol = fibonacci().iterate(&u, 4).unwrap();
        let vals: Vec<f64> = sol.vectors().iter().map(|v| v[0].re).collect();
        assert_eq!(vals, vec![1., 2., 3., 5., 8.]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let u = InitialCondition::basis(2, 1);
        assert!(matches!(
            fibonacci().iterate(&u, 3),
            Err(ModelError::VectorLength { .. })
        ));
        let mut w = InitialCondition::zero(2);
        assert!(w.insert(0, CVector::zeros(3)).is_err());
    }

    #[test]
    fn companion_matrices() {
        let f = fibonacci().companion_matrix().unwrap();
        assert_eq!(
            f,
            CMatrix::from_row_slice(2, 2, &[c(1.), c(1.), c(1.), c(0.)])
        );

        let printed = [
            [1., 1., -1., -1., 0., 1.],
            [1., 1., -1., -1., 1., 0.],
            [1., 0., 0., 0., 0., 0.],
            [0., 1., 0., 0., 0., 0.],
            [0., 0., 1., 0., 0., 0.],
            [0., 0., 0., 1., 0., 0.],
        ];
        let f2 = unit_circle_pair().companion_matrix().unwrap();
        assert_eq!(f2, CMatrix::from_fn(6, 6, |i, j| c(printed[i][j])));

        let single = Recurrence::scalar(&[3.])
            .unwrap()
            .companion_matrix()
            .unwrap();
        assert_eq!(single, CMatrix::from_element(1, 1, c(3.)));
    }

    #[test]
    fn companion_needs_finite_order() {
        let rec = Recurrence::new(CoefficientProvider::Periodic {
            preamble: vec![],
            cycle: vec![CMatrix::from_element(1, 1, c(0.5))],
        })
        .unwrap();
        assert_eq!(rec.order(), Order::Infinite);
        assert_eq!(rec.rho(), 1.0);
        assert_eq!(rec.companion_matrix(), Err(ModelError::InfiniteOrder));
    }

    #[test]
    fn beta_decode_examples() {
        assert_eq!(beta_decode(1, 2), (0, 1));
        assert_eq!(beta_decode(4, 2), (1, 2));
        assert_eq!(beta_decode(7, 3), (2, 1));
    }

    #[test]
    fn basis_coordinate_examples() {
        let u = InitialCondition::basis(2, 1);
        assert_eq!(u.basis_coordinates(), BTreeMap::from([(1, c(1.))]));
        assert!(InitialCondition::zero(3).basis_coordinates().is_empty());
        let w = InitialCondition::zero(2)
            .with(1, CVector::from_vec(vec![c(3.), c(-2.)]))
            .unwrap();
        assert_eq!(
            w.basis_coordinates(),
            BTreeMap::from([(3, c(3.)), (4, c(-2.))])
        );
    }

    #[test]
    fn beta_coordinates_are_inverse() {
        for p in [1usize, 2, 3, 5] {
            for beta in 1..=64 {
                let coords = InitialCondition::basis(p, beta).basis_coordinates();
                assert_eq!(coords, BTreeMap::from([(beta, c(1.))]), "p={p} beta={beta}");
                let (n, j) = beta_decode(beta, p);
                assert!(j >= 1 && j <= p);
                assert_eq!(n * p + j, beta);
            }
        }
    }

    #[test]
    fn rho_metadata() {
        assert_eq!(fibonacci().rho(), f64::INFINITY);
        assert_eq!(fibonacci().order(), Order::Finite(2));
    }

    #[test]
    fn iteration_satisfies_recurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let horizon = 40;
        for _ in 0..100 {
            let rec = random_recurrence(&mut rng);
            let u = random_condition(&mut rng, rec.dim());
            let sol = rec.iterate(&u, horizon).unwrap();
            let depth = u.max_index().unwrap_or(0) as isize;
            let value = |t: isize| -> CVector {
                if t >= 0 {
                    sol.get(t as usize).clone()
                } else {
                    u.get((-t) as usize)
                }
            };
            let Order::Finite(k) = rec.order() else {
                unreachable!()
            };
            for n in 0..horizon as isize {
                let mut rhs = CVector::zeros(rec.dim());
                for i in 0..k as isize {
                    if n - i >= -depth {
                        rhs += rec.matrix_at(i as usize) * value(n - i);
                    }
                }
                let scale = rhs.norm().max(1.0);
                assert!((value(n + 1) - rhs).norm() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn iteration_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let rec = random_recurrence(&mut rng);
            let p = rec.dim();
            let u = random_condition(&mut rng, p);
            let w = random_condition(&mut rng, p);
            let (a, b) = (random_c(&mut rng), random_c(&mut rng));
            let mut mix = InitialCondition::zero(p);
            for n in 0..4 {
                mix.insert(n, u.get(n) * a + w.get(n) * b).unwrap();
            }
            let h = 40;
            let su = rec.iterate(&u, h).unwrap();
            let sw = rec.iterate(&w, h).unwrap();
            let sm = rec.iterate(&mix, h).unwrap();
            for n in 0..=h {
                let expected = su.get(n) * a + sw.get(n) * b;
                let scale = expected.norm().max(1.0);
                assert!((sm.get(n) - expected).norm() <= 1e-10 * scale);
            }
        }
    }
}
