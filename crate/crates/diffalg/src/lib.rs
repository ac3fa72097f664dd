//! Exact-arithmetic differential algebra toolkit.
//!
//! The library mechanizes bounded-degree certification tasks around
//! polynomial vector fields and linear differential operators over ℚ(z):
//! derivations and Darboux polynomials, adjoints and the bilinear
//! concomitant, polynomial/rational solution spaces, Riccati-based
//! irreducibility evidence, antiderivative transcendence certificates,
//! and exact truncated power series (including the Airy fundamental
//! system and coefficient-growth classification).
//!
//! Everything is exact: the only floating point in the crate is the
//! fixed-precision logarithm used to fit growth exponents in
//! [`series::growth_classify`], and that never feeds back into any
//! algebraic verdict.

pub mod cli;
pub mod exact;
pub mod linalg;
pub mod linode;
pub mod mpoly;
pub mod parse;
pub mod report;
pub mod series;
pub mod vfield;

pub use exact::{BigRat, RatFunc, UniPoly};
pub use linode::DiffOperator;
pub use mpoly::{MultiPoly, Var};
pub use series::TruncSeries;
pub use vfield::{make_derivation, Derivation, PolyVectorField};
