//! Kneading matrices and determinants of vector linear recurrences.
//!
//! A recurrence `x_{n+1} = sum_{i>=0} A_i x_{n-i}` on `C^p`, of finite or
//! infinite order, is encoded by its kneading matrix
//! `K = sum_n A_n z^n` over truncated power series. The kneading determinant
//! `Delta = det(I - zK)` then gives
//!
//! - generating functions of solutions ([`kneading`]),
//! - the companion-matrix discriminant for finite order ([`kneading::companion_check`]),
//! - dominant generalized eigenvalues and Binet formulas ([`asymptotics`]).
//!
//! ```
//! use kneading::kneading::KneadingSystem;
//! use kneading::recurrence::{InitialCondition, Recurrence};
//!
//! let fib = Recurrence::scalar(&[1.0, 1.0]).unwrap();
//! let sys = KneadingSystem::build(&fib, 8).unwrap();
//! let g = sys.generating_function(&InitialCondition::basis(1, 1)).unwrap();
//! let first: Vec<f64> = g.component(1).coeffs()[..6].iter().map(|c| c.re).collect();
//! assert_eq!(first, [1.0, 1.0, 2.0, 3.0, 5.0, 8.0]);
//! ```

pub mod asymptotics;
pub mod cli;
pub mod kneading;
pub mod recurrence;
pub mod series;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/recurrences.md")]
    mod recurrences {}
    #[doc = include_str!("../../../book/src/kneading.md")]
    mod kneading {}
    #[doc = include_str!("../../../book/src/generating-functions.md")]
    mod generating_functions {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
