//! Fixtures and closed-form oracles shared by the integration tests.
#![allow(dead_code)]

use kneading::recurrence::{CMatrix, CoefficientProvider, Recurrence, Term};
use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn fibonacci() -> Recurrence {
    Recurrence::scalar(&[1., 1.]).unwrap()
}

/// The `Fib_2^3` recurrence with `A_0 = [[1,1],[1,1]]`, `A_1 = -A_0`,
/// `A_2 = [[0,1],[1,0]]`.
pub fn unit_circle_pair() -> Recurrence {
    let m = |v: [f64; 4]| CMatrix::from_row_slice(2, 2, &v.map(c));
    Recurrence::explicit(vec![
        m([1., 1., 1., 1.]),
        m([-1., -1., -1., -1.]),
        m([0., 1., 1., 0.]),
    ])
    .unwrap()
}

/// `A_n = (1/n!) [[-1/(n+1), 2^n], [(-1)^n, 0]]`.
pub fn factorial_pair() -> Recurrence {
    Recurrence::new(CoefficientProvider::ClosedForm {
        dim: 2,
        entries: vec![
            vec![Term::factorial(c(-1.), c(1.), 1)],
            vec![Term::factorial(c(1.), c(2.), 0)],
            vec![Term::factorial(c(1.), c(-1.), 0)],
            vec![],
        ],
    })
    .unwrap()
}

pub fn random_c(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random explicit recurrence, `p <= 3`, `k <= 4`, entries in the unit box.
pub fn random_finite(rng: &mut impl Rng) -> Recurrence {
    let p = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=4);
    let mats = (0..k)
        .map(|_| CMatrix::from_fn(p, p, |_, _| random_c(rng)))
        .collect();
    Recurrence::explicit(mats).unwrap()
}

/// Random closed-form recurrence whose terms all carry a factorial.
pub fn random_factorial_damped(rng: &mut impl Rng) -> Recurrence {
    let p = rng.gen_range(1..=3);
    let entries = (0..p * p)
        .map(|_| {
            (0..rng.gen_range(0..=2))
                .map(|_| Term {
                    coeff: random_c(rng),
                    ratio: random_c(rng) * 2.0,
                    power: rng.gen_range(0..=2),
                    shift: rng.gen_range(0..=2),
                    factorial: true,
                })
                .collect()
        })
        .collect();
    Recurrence::new(CoefficientProvider::ClosedForm { dim: p, entries }).unwrap()
}

/// Coefficients of `e^{r z}` up to `z^n`.
pub fn exp_coeffs(r: f64, n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for k in 1..=n {
        let prev = out[k - 1];
        out.push(prev * r / k as f64);
    }
    out
}

/// Plain truncated convolution of two real coefficient lists.
pub fn convolve(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            (0..=k)
                .map(|i| a.get(i).unwrap_or(&0.0) * b.get(k - i).unwrap_or(&0.0))
                .sum()
        })
        .collect()
}

/// `1/(1 - z^2) = 1 + z^2 + z^4 + ...`
pub fn even_geometric(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| if k % 2 == 0 { 1.0 } else { 0.0 })
        .collect()
}

/// Series of `(1 - z^2) e^z`.
pub fn factorial_pair_delta(n: usize) -> Vec<f64> {
    convolve(&[1., 0., -1.], &exp_coeffs(1.0, n), n)
}

/// Series of `(1 - z^2) e^z - z`.
pub fn factorial_pair_delta_1_1(n: usize) -> Vec<f64> {
    let mut d = factorial_pair_delta(n);
    d[1] -= 1.0;
    d
}

/// Series of `(1 - z^2) e^z - z^2 e^{-z}`.
pub fn factorial_pair_delta_2_1(n: usize) -> Vec<f64> {
    let d = factorial_pair_delta(n);
    let tail = convolve(&[0., 0., 1.], &exp_coeffs(-1.0, n), n);
    d.iter().zip(&tail).map(|(a, b)| a - b).collect()
}

/// Series of `1 / ((1 - z^2) e^z)` and `z / ((1 - z^2) e^{2z})`.
pub fn factorial_pair_gf_e1(n: usize) -> (Vec<f64>, Vec<f64>) {
    let g1 = convolve(&even_geometric(n), &exp_coeffs(-1.0, n), n);
    let g2 = convolve(
        &[0., 1.],
        &convolve(&even_geometric(n), &exp_coeffs(-2.0, n), n),
        n,
    );
    (g1, g2)
}

pub fn max_diff(a: &[Complex64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, &y)| (x - c(y)).norm())
        .fold(0.0, f64::max)
}

/// Rounding scale of `G_alpha(e_beta)` at `z^n` computed as `numerator / Delta`:
/// the larger of `|v_n|`, `|numerator| * max_{m<=n} |[1/Delta]_m|` and 1.
pub fn gf_error_scale(
    vn: &kneading::recurrence::CVector,
    numerator: &kneading::series::TruncatedSeries,
    delta: &kneading::series::TruncatedSeries,
    n: usize,
) -> f64 {
    let inv = delta.truncated(numerator.truncation()).invert().unwrap();
    let growth = inv.coeffs()[..=n]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    vn.camax().max(numerator.scale() * growth).max(1.0)
}

/// Random complex matrix of size `1..=4` with entries in the unit box.
pub fn random_square(rng: &mut impl Rng) -> CMatrix {
    let size = rng.gen_range(1..=4);
    CMatrix::from_fn(size, size, |_, _| random_c(rng))
}

/// `det(I - zX)` by series elimination and `exp(-sum_k tr(X^k) z^k / k)` by
/// brute-force matrix powers, both at truncation `n`.
pub fn exp_trace_sides(
    x: &CMatrix,
    n: usize,
) -> (
    kneading::series::TruncatedSeries,
    kneading::series::TruncatedSeries,
) {
    use kneading::series::{SeriesMatrix, TruncatedSeries};
    let det = SeriesMatrix::from_constant(x, n)
        .identity_minus_z()
        .unwrap()
        .determinant_lu()
        .unwrap();
    let mut power = CMatrix::identity(x.nrows(), x.ncols());
    let mut log = vec![Complex64::new(0.0, 0.0); n + 1];
    for (k, slot) in log.iter_mut().enumerate().skip(1) {
        power = &power * x;
        *slot = -power.trace() / k as f64;
    }
    let expected = TruncatedSeries::new(log).exp().unwrap();
    (det, expected)
}
