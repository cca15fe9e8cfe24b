//! Certified sums of four squares of univariate rational polynomials.
//!
//! Given a polynomial `f` with rational coefficients that is strictly positive
//! on the real line, the library decides (where its sound sufficient rules
//! allow) whether `f` is a sum of four squares in `Q[x]`, and otherwise
//! computes `h` such that `f - h^2` is certified to be one. The decision runs
//! through the factorization of `f` over the 2-adic numbers: a positive `f` is
//! a sum of four squares exactly when every odd-multiplicity irreducible
//! factor over `Q_2` has even degree.

pub mod certifier;
pub mod error;
pub mod hensel;
pub mod json;
pub mod newton_polygon;
pub mod padic;
pub mod ratpoly;
pub mod reduction;
pub mod text;

pub use error::{Error, Result};
pub use ratpoly::{RatPoly, Rational};
