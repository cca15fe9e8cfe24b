//! 2-adic valuations, squares in `Q_2`, and finite-precision square roots.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratpoly::Rational;

/// Working precision (in 2-adic digits) when a caller does not choose one.
pub const DEFAULT_PRECISION: u32 = 64;

/// Exponent of 2 in a nonzero integer.
pub fn ord2_int(n: &BigInt) -> u64 {
    n.trailing_zeros().expect("ord2 of zero")
}

/// `q = 2^v * unit` with the unit having odd numerator and denominator.
pub fn ord2(q: &Rational) -> Result<(i64, Rational)> {
    if q.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let vn = ord2_int(q.numer());
    let vd = ord2_int(q.denom());
    let unit = Rational::new(q.numer() >> vn, q.denom() >> vd);
    Ok((vn as i64 - vd as i64, unit))
}

/// Valuation, with `None` standing for the valuation of zero.
pub fn valuation(q: &Rational) -> Option<i64> {
    ord2(q).ok().map(|(v, _)| v)
}

pub(crate) fn pow2_big(m: u32) -> BigInt {
    BigInt::one() << m
}

/// Inverse of an odd integer modulo `2^m`, by Newton iteration `x <- x(2 - ax)`.
pub fn odd_inverse_mod_pow2(a: &BigInt, m: u32) -> BigInt {
    assert!(a.is_odd(), "only odd integers are invertible mod 2^m");
    let modulus = pow2_big(m);
    let a = a.mod_floor(&modulus);
    // a * a = 1 mod 8, so a is its own inverse to 3 bits.
    let mut x = a.clone();
    let mut bits = 3u32;
    while bits < m {
        x = (&x * (BigInt::from(2) - &a * &x)).mod_floor(&modulus);
        bits *= 2;
    }
    x.mod_floor(&modulus)
}

/// Residue in `[0, 2^m)` of a rational with nonnegative valuation.
pub fn residue_mod_pow2(q: &Rational, m: u32) -> Result<BigInt> {
    let modulus = pow2_big(m);
    if q.is_zero() {
        return Ok(BigInt::zero());
    }
    if q.denom().is_even() {
        return Err(Error::Precondition(format!(
            "{q} is not a 2-adic integer"
        )));
    }
    let inv = odd_inverse_mod_pow2(q.denom(), m);
    Ok((q.numer() * inv).mod_floor(&modulus))
}

/// Unit part of `q` reduced mod 8, `None` for zero.
pub fn unit_mod8(q: &Rational) -> Option<u8> {
    let (_, u) = ord2(q).ok()?;
    Some(residue_mod_pow2(&u, 3).ok()?.to_u8().expect("< 8"))
}

/// `true` iff `q` is a square in `Q_2`: zero, or even valuation with unit
/// part congruent to 1 mod 8.
pub fn is_square_in_q2(q: &Rational) -> bool {
    match ord2(q) {
        Err(_) => true,
        Ok((v, _)) => v % 2 == 0 && unit_mod8(q) == Some(1),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PadicValue {
    Zero,
    Nonzero {
        valuation: i64,
        #[serde(serialize_with = "crate::json::ser_biguint")]
        unit_residue: BigUint,
    },
}

/// `p^valuation * unit_residue`, the residue known modulo `p^precision`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadicApprox {
    pub p: u32,
    pub precision: u32,
    pub value: PadicValue,
}

impl PadicApprox {
    pub fn zero(precision: u32) -> Self {
        PadicApprox {
            p: 2,
            precision,
            value: PadicValue::Zero,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == PadicValue::Zero
    }
}

/// Square root of a 2-adic square `q`, correct to `m` digits of its unit.
///
/// The unit square root is the root of `x^2 - u` congruent to 1 mod 4,
/// refined by Newton's iteration from `x = 1` (valid since `u = 1 mod 8`).
pub fn padic_sqrt(q: &Rational, m: u32) -> Result<PadicApprox> {
    if m == 0 {
        return Err(Error::Precondition("precision must be positive".into()));
    }
    let (v, u) = ord2(q)?;
    if !is_square_in_q2(q) {
        return Err(Error::NotTwoAdicSquare(q.to_string()));
    }
    let work = m + 2;
    let modulus = pow2_big(work);
    let target = u64::from(m) + 1;
    let u_res = residue_mod_pow2(&u, work)?;
    let mut x = BigInt::one();
    loop {
        let err = &x * &x - &u_res;
        if err.is_zero() || ord2_int(&err) >= target {
            break;
        }
        let half = &err >> 1u32;
        let inv = odd_inverse_mod_pow2(&x, work);
        x = (&x - half * inv).mod_floor(&modulus);
    }
    let residue = x.mod_floor(&pow2_big(m));
    Ok(PadicApprox {
        p: 2,
        precision: m,
        value: PadicValue::Nonzero {
            valuation: v / 2,
            unit_residue: residue.to_biguint().expect("nonnegative"),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{int, rat};

    #[test]
    fn ord2_examples() {
        assert_eq!(ord2(&int(12)).unwrap(), (2, int(3)));
        assert_eq!(ord2(&rat(1, 4225)).unwrap(), (0, rat(1, 4225)));
        assert_eq!(ord2(&rat(63, 16 * 4225)).unwrap(), (-4, rat(63, 4225)));
        assert_eq!(ord2(&int(0)), Err(Error::ZeroValuation));
    }

    #[test]
    fn square_examples() {
        assert!(is_square_in_q2(&int(17)));
        for a in 1..20 {
            assert!(is_square_in_q2(&int(1 - 8 * a)));
        }
        assert!(!is_square_in_q2(&int(8)));
        assert!(!is_square_in_q2(&int(3)));
        assert!(!is_square_in_q2(&int(-1)));
        assert!(is_square_in_q2(&rat(1, 4)));
        assert!(is_square_in_q2(&rat(-7, 9)));
        assert!(is_square_in_q2(&int(0)));
    }

    #[test]
    fn inverse_mod_pow2() {
        for a in [1i64, 3, 5, 9, 12345, -7] {
            for m in [1u32, 3, 8, 64, 130] {
                let inv = odd_inverse_mod_pow2(&BigInt::from(a), m);
                assert!((BigInt::from(a) * inv - BigInt::one()).mod_floor(&pow2_big(m)).is_zero());
            }
        }
    }

    #[test]
    fn sqrt_examples() {
        let r = padic_sqrt(&int(17), 6).unwrap();
        let PadicValue::Nonzero { valuation, unit_residue } = r.value else {
            panic!("nonzero");
        };
        assert_eq!(valuation, 0);
        let res = BigInt::from(unit_residue);
        assert!((&res * &res - BigInt::from(17)).mod_floor(&BigInt::from(64)).is_zero());
        // Square roots mod 2^6 of a unit are determined mod 2^5 up to sign.
        let cls = res.mod_floor(&BigInt::from(32));
        assert!(cls == BigInt::from(9) || cls == BigInt::from(23));

        let r = padic_sqrt(&int(1), 10).unwrap();
        assert_eq!(
            r.value,
            PadicValue::Nonzero { valuation: 0, unit_residue: BigUint::one() }
        );
        let r = padic_sqrt(&int(4), 4).unwrap();
        assert_eq!(
            r.value,
            PadicValue::Nonzero { valuation: 1, unit_residue: BigUint::one() }
        );
        assert!(padic_sqrt(&int(3), 8).is_err());
    }

    #[test]
    fn sqrt_of_fraction() {
        let q = rat(-63 * 4, 4225);
        let r = padic_sqrt(&q, 40).unwrap();
        let PadicValue::Nonzero { valuation, unit_residue } = r.value else {
            panic!("nonzero");
        };
        assert_eq!(valuation, 1);
        let res = BigInt::from(unit_residue);
        let u = residue_mod_pow2(&rat(-63, 4225), 40).unwrap();
        assert!((&res * &res - u).mod_floor(&pow2_big(40)).is_zero());
    }
}
