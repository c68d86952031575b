//! Desk-scale computational number theory: prime gaps and their merit
//! statistics, the Erdős–Rankin covering/CRT construction of long composite
//! runs, Erdős–Kac additive statistics, the classic and shifted-prime
//! Kubilius probability models with exact rational measures, and
//! Halberstam–Richert-style sieve evaluators.
//!
//! Everything is exact where exactness is possible (big integers, reduced
//! fractions) and deterministic everywhere else (seeded RNG streams,
//! order-independent parallel reductions).

pub mod additive;
pub mod error;
pub mod gaps;
pub mod kubilius;
pub mod primes;
pub mod rankin;
pub mod serde_util;

pub use error::{Error, Result};

/// Arbitrary-precision nonnegative integer. Holds primorials, CRT solutions
/// and matrix entries, all of which overflow machine words even at toy scale.
pub type Natural = num_bigint::BigUint;

/// Exact fraction in lowest terms. Holds every probability-measure value.
pub type Rational = num_rational::BigRational;
