//! Radical towers Z[p₁^(1/d₁), p₂^(1/d₂), …] with prescribed Northcott numbers
//! for the house and the Weil height.
//!
//! The crate builds such towers step by step, certifies every arithmetic
//! condition of each step (congruence, monogenicity, freshness of primes,
//! window membership), encloses heights and discrepancies with outward-rounded
//! arithmetic, and ships brute-force oracles used to cross-check the bounds.

pub mod bounds;
pub mod checks;
pub mod construct;
pub mod discrepancy;
pub mod error;
pub mod exactcore;
pub mod heights;
pub mod numerics;
pub mod oracle;

pub use error::{Error, Result};
