//! Mod-2 factorization, Hensel lifting, and 2-adic root certification.

use crate::ratpoly::RatPoly;

mod f2poly;
mod lift;
mod roots;

pub use f2poly::F2Poly;
pub use lift::{hensel_split, reduce_mod2, HenselSplit};
pub use roots::{
    check_newton_conditions, newton_refine, valuation_at, verify_root_status, z2_root_status,
    RootStatus, RootTag, RootWitness, DEFAULT_ROOT_BUDGET,
};

/// Complete factorization over F_2.
pub fn f2_factor(f: &F2Poly) -> Vec<(F2Poly, usize)> {
    f.factor()
}

/// `f` scaled by a rational so that its coefficients are integers with no
/// common factor of 2. Roots and `Q_2` factorization are unchanged.
pub fn two_primitive(f: &RatPoly) -> RatPoly {
    RatPoly::from_bigints(&roots::integer_primitive(f))
}
