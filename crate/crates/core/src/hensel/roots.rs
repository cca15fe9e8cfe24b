//! Certified existence or absence of 2-adic roots.
//!
//! Existence is certified by a Newton witness `(gamma, delta)`:
//! `f(gamma) = 0 mod 2^(2 delta + 1)` and `ord_2 f'(gamma) = delta` force a
//! root congruent to `gamma` mod `2^(delta + 1)`. Absence is certified by a
//! pruned sieve: a depth `m` at which no residue `c mod 2^m` satisfies
//! `f(c) = 0 mod 2^m`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{odd_inverse_mod_pow2, ord2_int, pow2_big, valuation};
use crate::ratpoly::{RatPoly, Rational};

/// Default maximal sieve depth.
pub const DEFAULT_ROOT_BUDGET: u32 = 24;

/// Candidate residues kept alive per sieve level before giving up.
const MAX_CANDIDATES: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootTag {
    RootExists,
    NoRoot,
    Unknown,
}

/// Newton witness. With `reversed` set, `gamma` is a root approximation of
/// the reversed polynomial `x^d f(1/x)` lying in `2 Z_2`, i.e. the root of
/// `f` is `1 / gamma_bar` and has negative valuation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootWitness {
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub gamma: BigInt,
    pub delta: u32,
    pub modulus_exponent: u32,
    pub reversed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootStatus {
    pub tag: RootTag,
    pub witness: Option<RootWitness>,
    pub sieve_depth: u32,
    pub normalization: Option<String>,
}

impl RootStatus {
    pub fn has_root(&self) -> bool {
        self.tag == RootTag::RootExists
    }

    pub fn no_root(&self) -> bool {
        self.tag == RootTag::NoRoot
    }
}

/// Integer polynomial with the same roots: denominators cleared and the
/// common power of two removed.
pub(crate) fn integer_primitive(f: &RatPoly) -> Vec<BigInt> {
    let (_, cs) = f.to_integer_coeffs();
    let shift = cs
        .iter()
        .filter(|c| !c.is_zero())
        .map(ord2_int)
        .min()
        .unwrap_or(0);
    cs.into_iter().map(|c| c >> shift).collect()
}

fn eval_int(cs: &[BigInt], x: &BigInt) -> BigInt {
    cs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn derivative_int(cs: &[BigInt]) -> Vec<BigInt> {
    cs.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn ord_or_inf(n: &BigInt) -> u64 {
    if n.is_zero() {
        u64::MAX
    } else {
        ord2_int(n)
    }
}

/// `Some(delta)` when `(gamma, delta)` satisfies the Newton conditions.
fn newton_delta(cs: &[BigInt], dcs: &[BigInt], gamma: &BigInt) -> Option<u32> {
    let d = eval_int(dcs, gamma);
    if d.is_zero() {
        return None;
    }
    let delta = ord2_int(&d);
    let v = eval_int(cs, gamma);
    (ord_or_inf(&v) >= 2 * delta + 1).then_some(delta as u32)
}

enum Sieve {
    Root(BigInt, u32),
    Empty(u32),
    Exhausted(u32),
}

/// Pruned residue sieve; `level` is the exponent the starting candidates are
/// known modulo.
fn sieve(cs: &[BigInt], start: Vec<BigInt>, level: u32, budget: u32) -> Sieve {
    let dcs = derivative_int(cs);
    let mut level = level;
    let mut cands: Vec<BigInt> = start
        .into_iter()
        .filter(|c| ord_or_inf(&eval_int(cs, c)) >= u64::from(level))
        .collect();
    loop {
        if cands.is_empty() {
            return Sieve::Empty(level);
        }
        for c in &cands {
            if let Some(delta) = newton_delta(cs, &dcs, c) {
                return Sieve::Root(c.clone(), delta);
            }
        }
        if level >= budget || cands.len() > MAX_CANDIDATES {
            return Sieve::Exhausted(level);
        }
        let step = pow2_big(level);
        level += 1;
        cands = cands
            .iter()
            .flat_map(|c| [c.clone(), c + &step])
            .filter(|c| ord_or_inf(&eval_int(cs, c)) >= u64::from(level))
            .collect();
    }
}

/// Root status of `f` over `Q_2`.
///
/// When the leading coefficient (after clearing denominators and the common
/// power of two) is odd, every root in `Q_2` is a 2-adic integer and one sieve
/// over `Z_2` decides. Otherwise roots of negative valuation are searched as
/// roots in `2 Z_2` of the reversed polynomial, and the status combines both
/// searches.
pub fn z2_root_status(f: &RatPoly, budget: u32) -> RootStatus {
    let cs = integer_primitive(f);
    if cs.len() <= 1 {
        return RootStatus {
            tag: if f.is_zero() { RootTag::RootExists } else { RootTag::NoRoot },
            witness: None,
            sieve_depth: 0,
            normalization: None,
        };
    }
    let unit_leading = cs.last().expect("nonempty").is_odd();
    let direct = sieve(&cs, vec![BigInt::zero(), BigInt::one()], 1, budget);
    let witness = |gamma: BigInt, delta: u32, reversed: bool| RootWitness {
        gamma,
        delta,
        modulus_exponent: 2 * delta + 1,
        reversed,
    };
    let normalization = (!unit_leading).then(|| {
        "leading coefficient has positive 2-adic valuation; negative-valuation roots searched on the reversed polynomial".to_string()
    });
    if let Sieve::Root(g, d) = direct {
        return RootStatus {
            tag: RootTag::RootExists,
            witness: Some(witness(g, d, false)),
            sieve_depth: 0,
            normalization,
        };
    }
    let reversed = if unit_leading {
        Sieve::Empty(0)
    } else {
        let rev: Vec<BigInt> = cs.iter().rev().cloned().collect();
        sieve(&rev, vec![BigInt::zero()], 1, budget)
    };
    match (direct, reversed) {
        (_, Sieve::Root(g, d)) => RootStatus {
            tag: RootTag::RootExists,
            witness: Some(witness(g, d, true)),
            sieve_depth: 0,
            normalization,
        },
        (Sieve::Empty(a), Sieve::Empty(b)) => RootStatus {
            tag: RootTag::NoRoot,
            witness: None,
            sieve_depth: a.max(b),
            normalization,
        },
        (Sieve::Exhausted(a), _) | (_, Sieve::Exhausted(a)) => RootStatus {
            tag: RootTag::Unknown,
            witness: None,
            sieve_depth: a,
            normalization,
        },
        (Sieve::Root(..), _) => unreachable!("handled above"),
    }
}

/// Re-verifies a status from scratch: a witness against the Newton
/// conditions, a sieve depth by exhaustive enumeration of all residues.
pub fn verify_root_status(f: &RatPoly, status: &RootStatus) -> bool {
    let cs = integer_primitive(f);
    match status.tag {
        RootTag::RootExists => {
            let Some(w) = &status.witness else {
                return f.is_zero();
            };
            let target = if w.reversed {
                cs.iter().rev().cloned().collect()
            } else {
                cs
            };
            if w.reversed && w.gamma.is_odd() {
                return false;
            }
            newton_delta(&target, &derivative_int(&target), &w.gamma) == Some(w.delta)
        }
        RootTag::NoRoot => {
            if cs.len() <= 1 {
                return !f.is_zero();
            }
            let m = status.sieve_depth;
            if m > 24 {
                return false;
            }
            let modulus = pow2_big(m);
            let none_in = |poly: &[BigInt], only_even: bool| {
                let mut c = BigInt::zero();
                while c < modulus {
                    if !(only_even && c.is_odd())
                        && eval_int(poly, &c).mod_floor(&modulus).is_zero()
                    {
                        return false;
                    }
                    c += 1;
                }
                true
            };
            let unit_leading = cs.last().expect("nonempty").is_odd();
            let rev: Vec<BigInt> = cs.iter().rev().cloned().collect();
            none_in(&cs, false) && (unit_leading || none_in(&rev, true))
        }
        RootTag::Unknown => true,
    }
}

fn two_integral(f: &RatPoly) -> Result<Vec<BigInt>> {
    if f.coeffs().iter().any(|c| c.denom().is_even()) {
        return Err(Error::Precondition(
            "coefficients must be 2-adic integers".into(),
        ));
    }
    // Clearing an odd denominator changes neither roots nor valuations.
    Ok(f.to_integer_coeffs().1)
}

/// Checks the three Newton conditions for a polynomial with 2-integral
/// coefficients.
pub fn check_newton_conditions(f: &RatPoly, gamma: &BigInt, delta: u32) -> Result<()> {
    let cs = two_integral(f)?;
    let v = eval_int(&cs, gamma);
    if ord_or_inf(&v) < 2 * u64::from(delta) + 1 {
        return Err(Error::NewtonConditions(format!(
            "f(gamma) is not 0 mod 2^{}",
            2 * delta + 1
        )));
    }
    let d = eval_int(&derivative_int(&cs), gamma);
    if d.is_zero() || ord2_int(&d) != u64::from(delta) {
        return Err(Error::NewtonConditions(format!(
            "ord_2 f'(gamma) differs from {delta}"
        )));
    }
    Ok(())
}

/// Residue modulo `2^m` of the unique root congruent to `gamma` mod
/// `2^(delta + 1)`.
pub fn newton_refine(f: &RatPoly, gamma: &BigInt, delta: u32, m: u32) -> Result<BigInt> {
    check_newton_conditions(f, gamma, delta)?;
    let cs = two_integral(f)?;
    let dcs = derivative_int(&cs);
    let work = m + 2 * delta + 2;
    let modulus = pow2_big(work);
    let target = u64::from(m) + u64::from(delta);
    let mut x = gamma.mod_floor(&modulus);
    for _ in 0..=2 * work {
        let v = eval_int(&cs, &x);
        if ord_or_inf(&v) >= target {
            return Ok(x.mod_floor(&pow2_big(m)));
        }
        let d = eval_int(&dcs, &x);
        let t = v >> delta;
        let u = d >> delta;
        let step = (t * odd_inverse_mod_pow2(&u, work)).mod_floor(&modulus);
        x = (x - step).mod_floor(&modulus);
    }
    Err(Error::NewtonConditions("refinement did not converge".into()))
}

/// 2-adic valuation of `f(x)` for an integer `x`, `None` when it vanishes.
pub fn valuation_at(f: &RatPoly, x: &BigInt) -> Option<i64> {
    valuation(&f.evaluate(&Rational::from_integer(x.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::from_ints(c)
    }

    #[test]
    fn root_exists_for_17() {
        let f = p(&[-17, 0, 1]);
        let s = z2_root_status(&f, 16);
        assert_eq!(s.tag, RootTag::RootExists);
        let w = s.witness.clone().unwrap();
        assert_eq!(w.delta, 1);
        assert!((&w.gamma * &w.gamma - BigInt::from(17)).mod_floor(&BigInt::from(8)).is_zero());
        assert!(verify_root_status(&f, &s));
        assert!(check_newton_conditions(&f, &BigInt::from(9), 1).is_ok());
    }

    #[test]
    fn no_root_for_3() {
        let f = p(&[-3, 0, 1]);
        let s = z2_root_status(&f, 16);
        assert_eq!(s.tag, RootTag::NoRoot);
        assert_eq!(s.sieve_depth, 2);
        assert!(verify_root_status(&f, &s));
    }

    #[test]
    fn non_unit_leading() {
        // 4x^2 + x + 4 has roots in Q_2 (discriminant -63 = 1 mod 8).
        let s = z2_root_status(&p(&[4, 1, 4]), 16);
        assert!(s.has_root());
        // 8x^2 + 3: roots would need -3/8 square; odd valuation.
        let f = p(&[3, 0, 8]);
        let s = z2_root_status(&f, 16);
        assert_eq!(s.tag, RootTag::NoRoot);
        assert!(verify_root_status(&f, &s));
        // 2x - 1: root 1/2 of negative valuation.
        let s = z2_root_status(&p(&[-1, 2]), 16);
        assert!(s.has_root());
        assert!(s.witness.as_ref().unwrap().reversed);
        assert!(s.normalization.is_some());
    }

    #[test]
    fn double_root_is_unknown() {
        let s = z2_root_status(&p(&[1, -2, 1]), 12);
        assert_eq!(s.tag, RootTag::Unknown);
    }

    #[test]
    fn refine_examples() {
        let f = p(&[-17, 0, 1]);
        let r = newton_refine(&f, &BigInt::from(9), 1, 10).unwrap();
        assert!((&r * &r - BigInt::from(17)).mod_floor(&BigInt::from(1024)).is_zero());
        assert_eq!(newton_refine(&p(&[-5, 1]), &BigInt::from(5), 0, 30).unwrap(), BigInt::from(5));
        assert_eq!(newton_refine(&p(&[3, -4, 1]), &BigInt::from(1), 1, 8).unwrap(), BigInt::from(1));
        assert!(newton_refine(&p(&[-3, 0, 1]), &BigInt::from(1), 1, 8).is_err());
    }

    #[test]
    fn refine_reaches_precision() {
        let f = p(&[6, 1, 0, 1]);
        let s = z2_root_status(&f, 20);
        let w = s.witness.unwrap();
        for m in [5u32, 17, 64, 200] {
            let r = newton_refine(&f, &w.gamma, w.delta, m).unwrap();
            let v = valuation_at(&f, &r);
            assert!(v.is_none_or(|v| v >= i64::from(m)));
        }
    }
}
