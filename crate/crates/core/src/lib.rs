//! Exact computational kernel for analytic geometry over the integers.
//!
//! Seminorms on Z and on Z[T], certified norms of Laurent polynomials over
//! relative annuli, Weierstrass division and Hensel lifting, Cousin splittings
//! with the Cartan factorization, and the cyclic-cover constructions used for
//! inverse Galois problems. All arithmetic is exact over Q; irrational
//! quantities are enclosed in outward-rounded dyadic intervals.

pub mod error;
pub mod norm;
pub mod poly;
pub mod rational;
pub mod series_ring;
pub mod weierstrass;

pub mod affine_line;
pub mod base_space;
pub mod cousin_cartan;
pub mod covers_galois;
pub mod selftest;

pub use error::{Error, Result};
pub use norm::{NormValue, Precision};
pub use rational::Q;
