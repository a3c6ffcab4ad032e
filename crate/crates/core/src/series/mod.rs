//! Truncated formal power series over `Complex64`.
//!
//! A [`TruncatedSeries`] at truncation `N` stores the coefficients of
//! `z^0..=z^N`. Products discard every degree above `N`. Binary operations
//! require both operands to share the same truncation; a mismatch is an error
//! rather than an implicit `min`.

mod matrix;

pub use matrix::SeriesMatrix;

use num_complex::Complex64;
use thiserror::Error;

/// Relative threshold under which a constant term is treated as zero when
/// inverting.
pub const INVERT_EPS: f64 = 1e-12;

/// Relative threshold under which a constant term is accepted as zero when
/// dividing by `z` or exponentiating.
pub const ZERO_CONSTANT_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },
    #[error("constant term {value} is not invertible (threshold {threshold:e})")]
    NonInvertibleConstantTerm { value: Complex64, threshold: f64 },
    #[error("constant term of magnitude {residual:e} does not vanish (threshold {threshold:e})")]
    NonzeroConstantTerm { residual: f64, threshold: f64 },
    #[error("constant term {value} should be {expected}")]
    BadConstantTerm {
        value: Complex64,
        expected: Complex64,
    },
    #[error(
        "pivot {step} has a non-invertible constant term; the matrix is not of the form I - z*M"
    )]
    PivotNotInvertible { step: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("{rows}x{cols} matrix needs {expected} entries, got {got}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
}

pub type Result<T, E = SeriesError> = std::result::Result<T, E>;

/// A power series modulo `z^(N+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    /// Builds a series from its coefficients; the truncation is
    /// `coeffs.len() - 1`.
    ///
    /// Panics if `coeffs` is empty.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a truncated series needs at least one coefficient"
        );
        TruncatedSeries { coeffs }
    }

    /// Takes the leading coefficients of `coeffs` up to `z^truncation`,
    /// padding with zeros when too few are given.
    pub fn from_slice(coeffs: &[Complex64], truncation: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); truncation + 1];
        for (dst, src) in v.iter_mut().zip(coeffs) {
            *dst = *src;
        }
        TruncatedSeries { coeffs: v }
    }

    pub fn from_real(coeffs: &[f64], truncation: usize) -> Self {
        let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_slice(&c, truncation)
    }

    /// Coefficients produced by `f(n)` for `n = 0..=truncation`.
    pub fn from_fn(truncation: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        TruncatedSeries {
            coeffs: (0..=truncation).map(f).collect(),
        }
    }

    pub fn zero(truncation: usize) -> Self {
        Self::constant(Complex64::new(0.0, 0.0), truncation)
    }

    pub fn one(truncation: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), truncation)
    }

    pub fn constant(c: Complex64, truncation: usize) -> Self {
        let mut s = Self::zero_vec(truncation);
        s.coeffs[0] = c;
        s
    }

    /// The series `z`, which vanishes at truncation 0.
    pub fn z(truncation: usize) -> Self {
        let mut s = Self::zero_vec(truncation);
        if truncation >= 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    fn zero_vec(truncation: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Complex64::new(0.0, 0.0); truncation + 1],
        }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^n`, zero past the truncation.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Largest coefficient modulus; the reference scale for relative
    /// thresholds.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Largest coefficientwise distance to `other`, comparing past either
    /// truncation as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|n| (self.coeff(n) - other.coeff(n)).norm())
            .fold(0.0, f64::max)
    }

    /// Drops coefficients above `z^truncation`.
    ///
    /// Panics if `truncation` exceeds the current truncation; lowering the
    /// precision has to be explicit, raising it is impossible.
    pub fn truncated(&self, truncation: usize) -> Self {
        assert!(
            truncation <= self.truncation(),
            "cannot raise truncation from {} to {}",
            self.truncation(),
            truncation
        );
        TruncatedSeries {
            coeffs: self.coeffs[..=truncation].to_vec(),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.coeffs.len() == other.coeffs.len() {
            Ok(())
        } else {
            Err(SeriesError::TruncationMismatch {
                left: self.truncation(),
                right: other.truncation(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Cauchy product truncated at the shared truncation.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            for (o, &b) in out[i..].iter_mut().zip(&other.coeffs) {
                *o += a * b;
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// `self += a * b`, truncated; operands share the truncation.
    pub(crate) fn add_assign_product(&mut self, a: &Self, b: &Self) {
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for (o, &y) in self.coeffs[i..].iter_mut().zip(&b.coeffs) {
                *o += x * y;
            }
        }
    }

    pub(crate) fn sub_unchecked(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(Complex64::new(-1.0, 0.0))
    }

    /// Multiplies by `z`, dropping the coefficient pushed past the truncation.
    pub fn mul_z(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs[..self.coeffs.len() - 1]);
        TruncatedSeries { coeffs }
    }

    /// Multiplicative inverse, via `b_n = -c_0^{-1} sum_{k=1..n} c_k b_{n-k}`.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        let threshold = INVERT_EPS * self.scale();
        if c0.norm() <= threshold || c0.norm() == 0.0 {
            return Err(SeriesError::NonInvertibleConstantTerm {
                value: c0,
                threshold,
            });
        }
        Ok(self.invert_unchecked())
    }

    /// Inverse without the constant-term check; the caller guarantees
    /// `c_0 != 0`.
    pub(crate) fn invert_unchecked(&self) -> Self {
        let inv0 = self.coeffs[0].inv();
        let n = self.coeffs.len();
        let mut b = Vec::with_capacity(n);
        b.push(inv0);
        for k in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * b[k - j];
            }
            b.push(-inv0 * acc);
        }
        TruncatedSeries { coeffs: b }
    }

    /// Divides by `z`. The constant term must vanish to within
    /// `ZERO_CONSTANT_EPS * scale`; the result has truncation `N - 1`.
    ///
    /// At truncation 0 there is nothing left after the shift, and the result
    /// is the zero series at truncation 0.
    pub fn shift_div_z(&self) -> Result<Self> {
        let residual = self.coeffs[0].norm();
        let threshold = ZERO_CONSTANT_EPS * self.scale();
        if residual > threshold {
            return Err(SeriesError::NonzeroConstantTerm {
                residual,
                threshold,
            });
        }
        if self.coeffs.len() == 1 {
            return Ok(Self::zero(0));
        }
        Ok(TruncatedSeries {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// `exp` of a series with vanishing constant term.
    pub fn exp(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() > ZERO_CONSTANT_EPS * self.scale() {
            return Err(SeriesError::BadConstantTerm {
                value: a0,
                expected: Complex64::new(0.0, 0.0),
            });
        }
        // n b_n = sum_{k=1..n} k a_k b_{n-k}
        let n = self.coeffs.len();
        let mut b = Vec::with_capacity(n);
        b.push(a0.exp());
        for m in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=m {
                acc += self.coeffs[k] * b[m - k] * k as f64;
            }
            b.push(acc / m as f64);
        }
        Ok(TruncatedSeries { coeffs: b })
    }

    /// `log` of a series with unit constant term.
    pub fn log(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        let one = Complex64::new(1.0, 0.0);
        if (a0 - one).norm() > INVERT_EPS * self.scale() {
            return Err(SeriesError::BadConstantTerm {
                value: a0,
                expected: one,
            });
        }
        // n a_0 l_n = n a_n - sum_{k=1..n-1} k l_k a_{n-k}
        let n = self.coeffs.len();
        let mut l = Vec::with_capacity(n);
        l.push(a0.ln());
        for m in 1..n {
            let mut acc = self.coeffs[m] * m as f64;
            for (k, lk) in l.iter().enumerate().skip(1) {
                acc -= lk * self.coeffs[m - k] * k as f64;
            }
            l.push(acc / (a0 * m as f64));
        }
        Ok(TruncatedSeries { coeffs: l })
    }

    /// Formal derivative, at truncation `N - 1` (truncation 0 stays at 0).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        }
    }

    /// Horner evaluation of the truncation polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Coefficients of the truncation polynomial re-expanded in `w = z - center`.
    pub fn taylor_shift(&self, center: Complex64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n.saturating_sub(1) {
            for j in (i..n - 1).rev() {
                let next = c[j + 1];
                c[j] += center * next;
            }
        }
        TruncatedSeries { coeffs: c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real(coeffs: &[f64], n: usize) -> TruncatedSeries {
        TruncatedSeries::from_real(coeffs, n)
    }

    fn close(a: &TruncatedSeries, b: &TruncatedSeries, tol: f64) -> bool {
        a.truncation() == b.truncation() && a.max_abs_diff(b) <= tol
    }

    #[test]
    fn add_examples() {
        let s = real(&[1., 1.], 3).add(&real(&[1., -1.], 3)).unwrap();
        assert_eq!(s, real(&[2.], 3));
        let a = real(&[0.5, -2., 4.], 5);
        assert_eq!(TruncatedSeries::zero(5).add(&a).unwrap(), a);
        let s = real(&[1., 2., 3.], 2).add(&real(&[1., 1.], 2)).unwrap();
        assert_eq!(s, real(&[2., 3., 3.], 2));
    }

    #[test]
    fn mixed_truncation_is_rejected() {
        let err = real(&[1.], 2).add(&real(&[1.], 3)).unwrap_err();
        assert_eq!(err, SeriesError::TruncationMismatch { left: 2, right: 3 });
        assert!(real(&[1.], 2).mul(&real(&[1.], 3)).is_err());
        assert!(real(&[1.], 4).sub(&real(&[1.], 3)).is_err());
    }

    #[test]
    fn mul_examples() {
        let p = real(&[1., 1.], 4).mul(&real(&[1., -1.], 4)).unwrap();
        assert_eq!(p, real(&[1., 0., -1.], 4));
        let a = real(&[3., -1., 2., 7.], 6);
        assert_eq!(a.mul(&TruncatedSeries::one(6)).unwrap(), a);
        let f = real(&[1., -1., -1.], 10);
        assert_eq!(
            f.mul(&f.invert().unwrap()).unwrap(),
            TruncatedSeries::one(10)
        );
    }

    #[test]
    fn invert_examples() {
        assert_eq!(
            real(&[1., -1.], 3).invert().unwrap(),
            real(&[1., 1., 1., 1.], 3)
        );
        assert_eq!(
            TruncatedSeries::one(4).invert().unwrap(),
            TruncatedSeries::one(4)
        );

        // Fibonacci convolution oracle: b_n = b_{n-1} + b_{n-2}.
        let mut fib = vec![1.0, 1.0];
        while fib.len() < 6 {
            let k = fib.len();
            fib.push(fib[k - 1] + fib[k - 2]);
        }
        assert_eq!(real(&[1., -1., -1.], 5).invert().unwrap(), real(&fib, 5));
    }

    #[test]
    fn invert_rejects_vanishing_constant() {
        assert!(matches!(
            real(&[0., 1.], 3).invert(),
            Err(SeriesError::NonInvertibleConstantTerm { .. })
        ));
        assert!(real(&[1e-14, 1.], 3).invert().is_err());
        assert!(TruncatedSeries::zero(2).invert().is_err());
    }

    #[test]
    fn shift_div_z_examples() {
        assert_eq!(
            real(&[0., 1., 1.], 2).shift_div_z().unwrap(),
            real(&[1., 1.], 1)
        );
        assert_eq!(
            TruncatedSeries::zero(3).shift_div_z().unwrap(),
            TruncatedSeries::zero(2)
        );

        let g = real(&[0., 1.], 6)
            .mul(&real(&[1., -1., -1.], 6).invert().unwrap())
            .unwrap()
            .shift_div_z()
            .unwrap();
        assert_eq!(g, real(&[1., 1., 2., 3., 5., 8.], 5));

        assert!(matches!(
            real(&[1e-3, 1.], 2).shift_div_z(),
            Err(SeriesError::NonzeroConstantTerm { .. })
        ));
    }

    #[test]
    fn exp_log_examples() {
        let e = TruncatedSeries::z(3).exp().unwrap();
        assert!(close(&e, &real(&[1., 1., 0.5, 1. / 6.], 3), 1e-15));
        assert!(matches!(
            TruncatedSeries::one(3).exp(),
            Err(SeriesError::BadConstantTerm { .. })
        ));
        assert!(matches!(
            real(&[2., 1.], 3).log(),
            Err(SeriesError::BadConstantTerm { .. })
        ));
        // log(1 - z) = -sum z^n / n
        let l = real(&[1., -1.], 6).log().unwrap();
        let expected: Vec<f64> = (0..=6)
            .map(|n| if n == 0 { 0.0 } else { -1.0 / n as f64 })
            .collect();
        assert!(close(&l, &real(&expected, 6), 1e-15));
    }

    /// Brute-force sum of -tr(X^n)/n z^n for a 2x2 matrix given row-major.
    fn neg_trace_series(x: [[f64; 2]; 2], n: usize) -> TruncatedSeries {
        let mut pow = [[1.0, 0.0], [0.0, 1.0]];
        let mut coeffs = vec![0.0; n + 1];
        for (k, ck) in coeffs.iter_mut().enumerate().skip(1) {
            let mut next = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    next[i][j] = pow[i][0] * x[0][j] + pow[i][1] * x[1][j];
                }
            }
            pow = next;
            *ck = -(pow[0][0] + pow[1][1]) / k as f64;
        }
        real(&coeffs, n)
    }

    #[test]
    fn exp_trace_rotation() {
        let x = [[0.0, 1.0], [-1.0, 0.0]];
        let e = neg_trace_series(x, 8).exp().unwrap();
        // det(I - zX) = (1)(1) - (-z)(z) = 1 + z^2
        assert!(close(&e, &real(&[1., 0., 1.], 8), 1e-14));
    }

    #[test]
    fn taylor_shift_examples() {
        assert_eq!(real(&[1., 1.], 1).taylor_shift(c(1.)), real(&[2., 1.], 1));
        assert_eq!(
            real(&[1., 0., -1.], 2).taylor_shift(c(1.)),
            real(&[0., -2., -1.], 2)
        );
    }

    #[test]
    fn eval_and_derivative() {
        assert_eq!(real(&[1., -1., -1.], 2).eval(c(0.)), c(1.));
        assert!(TruncatedSeries::constant(c(5.), 4).derivative().is_zero());
        assert_eq!(real(&[1., 2., 3.], 2).derivative(), real(&[2., 6.], 1));

        // (1 - z^2) e^z, expanded by hand: c_n = 1/n! - 1/(n-2)!
        let n = 40;
        let mut fact = vec![1.0f64; n + 1];
        for k in 1..=n {
            fact[k] = fact[k - 1] * k as f64;
        }
        let coeffs: Vec<f64> = (0..=n)
            .map(|k| 1.0 / fact[k] - if k >= 2 { 1.0 / fact[k - 2] } else { 0.0 })
            .collect();
        assert!(real(&coeffs, n).eval(c(1.)).norm() < 1e-12);
    }

    #[test]
    fn truncated_keeps_prefix() {
        let a = real(&[1., 2., 3., 4.], 3);
        assert_eq!(a.truncated(1), real(&[1., 2.], 1));
    }

    #[test]
    #[should_panic]
    fn truncated_cannot_raise() {
        real(&[1.], 2).truncated(3);
    }

    fn arb_c64() -> impl Strategy<Value = Complex64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
    }

    fn arb_series(n: usize) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec(arb_c64(), n + 1).prop_map(TruncatedSeries::new)
    }

    fn arb_unit_series(n: usize) -> impl Strategy<Value = TruncatedSeries> {
        (arb_series(n), arb_c64()).prop_map(|(s, phase)| {
            let mut v = s.into_coeffs();
            let u = Complex64::from_polar(1.0, phase.re * std::f64::consts::PI);
            v[0] = u;
            TruncatedSeries::new(v)
        })
    }

    proptest! {
        #[test]
        fn distributive(a in arb_series(16), b in arb_series(16), c in arb_series(16)) {
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            let scale = lhs.scale().max(1.0);
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale);
        }

        #[test]
        fn inverse_is_two_sided(a in arb_unit_series(24)) {
            let b = a.invert().unwrap();
            let one = TruncatedSeries::one(24);
            let prod = a.mul(&b).unwrap();
            // inverse coefficients grow geometrically for unit-box inputs
            let tol = 1e-12 * b.scale().max(1.0);
            prop_assert!(prod.max_abs_diff(&one) <= tol);
        }

        #[test]
        fn exp_log_round_trip(mut v in proptest::collection::vec(arb_c64(), 1..=33)) {
            v[0] = Complex64::new(0.0, 0.0);
            let a = TruncatedSeries::new(v);
            let back = a.exp().unwrap().log().unwrap();
            prop_assert!(back.max_abs_diff(&a) <= 1e-10);
        }

        #[test]
        fn taylor_shift_round_trip(a in arb_series(12), c in arb_c64()) {
            let back = a.taylor_shift(c).taylor_shift(-c);
            prop_assert!(back.max_abs_diff(&a) <= 1e-10 * a.scale().max(1.0));
        }

        #[test]
        fn taylor_shift_preserves_values(a in arb_series(12), c in arb_c64(), pts in proptest::collection::vec(arb_c64(), 20)) {
            let shifted = a.taylor_shift(c);
            for z in pts {
                let direct = a.eval(z);
                let w = z - c;
                let local = shifted.eval(w);
                // rounding scale of the shifted evaluation
                let cond: f64 = shifted
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, b)| b.norm() * w.norm().powi(k as i32))
                    .sum();
                prop_assert!((direct - local).norm() <= 1e-12 * cond.max(1.0));
            }
        }
    }
}
