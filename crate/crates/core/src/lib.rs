//! Numerical laboratory for the ternary form lambda1 p1 + lambda2 p2 +
//! lambda3 p3^k over primes: exponential sums, Fejér detection, arc
//! integrals of the Davenport–Heilbronn circle method, exact brute-force
//! ground truth, and the exponent linear program tying them together.

pub mod error;
pub mod util;

pub mod arcs;
pub mod expsum;
pub mod form;
pub mod kernel;
pub mod lp;
pub mod primes;
pub mod quad;
pub mod rational;
pub mod search;

pub use error::{Error, Result};
