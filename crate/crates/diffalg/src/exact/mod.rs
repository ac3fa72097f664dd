//! Exact rational arithmetic substrate: arbitrary-precision rationals,
//! dense univariate polynomials over ℚ, and reduced rational functions.

mod ratfunc;
mod roots;
mod unipoly;

pub use ratfunc::RatFunc;
pub use roots::{rational_roots, RationalRoot};
pub use unipoly::UniPoly;

use num::BigRational;

/// Arbitrary-precision rational number. `num::BigRational` keeps the
/// denominator positive and the fraction fully reduced, which is exactly
/// the invariant we need.
pub type BigRat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> BigRat {
    BigRat::from_integer(n.into())
}

/// Rational p/q. Panics when q = 0.
pub fn ratio(p: i64, q: i64) -> BigRat {
    BigRat::new(p.into(), q.into())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials")]
    GcdOfZeros,
    #[error("rational roots of the zero polynomial")]
    RootsOfZero,
    #[error("coefficient too large for divisor enumeration")]
    DivisorEnumeration,
}
