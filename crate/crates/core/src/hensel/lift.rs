//! Quadratic Hensel lifting of a coprime factorization modulo 2.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::f2poly::F2Poly;
use crate::error::{Error, Result};
use crate::padic::{pow2_big, residue_mod_pow2};
use crate::ratpoly::RatPoly;

/// Dense polynomial with coefficients reduced modulo a power of two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ModPoly(pub Vec<BigInt>);

impl ModPoly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    fn reduce(self, m: &BigInt) -> Self {
        ModPoly(self.0.into_iter().map(|c| c.mod_floor(m)).collect()).trim()
    }

    fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn add(&self, o: &Self, m: &BigInt) -> Self {
        let n = self.0.len().max(o.0.len());
        ModPoly((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect()).reduce(m)
    }

    fn sub(&self, o: &Self, m: &BigInt) -> Self {
        let n = self.0.len().max(o.0.len());
        ModPoly((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect()).reduce(m)
    }

    fn mul(&self, o: &Self, m: &BigInt) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return ModPoly(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ModPoly(out).reduce(m)
    }

    /// Division by a monic polynomial.
    fn div_rem_monic(&self, d: &Self, m: &BigInt) -> (Self, Self) {
        let dd = d.degree().expect("nonzero divisor");
        debug_assert!(d.0[dd].is_one());
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (ModPoly(Vec::new()), self.clone());
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..rem.len() - dd).rev() {
            let q = rem[k + dd].mod_floor(m);
            if q.is_zero() {
                continue;
            }
            for (j, c) in d.0.iter().enumerate() {
                rem[k + j] -= &q * c;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (ModPoly(quot).reduce(m), ModPoly(rem).reduce(m))
    }

    fn from_f2(p: &F2Poly) -> Self {
        ModPoly(
            p.coeffs()
                .into_iter()
                .map(|b| if b { BigInt::one() } else { BigInt::zero() })
                .collect(),
        )
    }

    pub(crate) fn to_f2(&self) -> F2Poly {
        F2Poly::from_coeffs(self.0.iter().map(|c| c.is_odd()))
    }

    pub(crate) fn to_ratpoly(&self) -> RatPoly {
        RatPoly::from_bigints(&self.0)
    }
}

/// Residues modulo `2^m` of a polynomial with 2-integral coefficients.
pub(crate) fn residues(f: &RatPoly, m: u32) -> Result<ModPoly> {
    let cs = f
        .coeffs()
        .iter()
        .map(|c| residue_mod_pow2(c, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModPoly(cs).trim())
}

/// Reduction modulo 2 of a 2-integral polynomial.
pub fn reduce_mod2(f: &RatPoly) -> Result<F2Poly> {
    Ok(residues(f, 1)?.to_f2())
}

/// A factorization `f = g * h mod 2^precision` with `g` monic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HenselSplit {
    pub precision: u32,
    pub g: RatPoly,
    pub h: RatPoly,
}

impl HenselSplit {
    /// Re-checks `g * h = f mod 2^precision`, `g` monic, and the mod-2 images.
    pub fn verify(&self, f: &RatPoly, g1: &F2Poly, h1: &F2Poly) -> bool {
        let m = pow2_big(self.precision);
        let (Ok(f), Ok(g), Ok(h)) = (
            residues(f, self.precision),
            residues(&self.g, self.precision),
            residues(&self.h, self.precision),
        ) else {
            return false;
        };
        g.degree().is_some_and(|d| g.0[d].is_one())
            && g.mul(&h, &m) == f
            && g.to_f2() == *g1
            && h.to_f2() == *h1
    }
}

/// Lifts `[f] = g1 * h1` (coprime over F_2, `g1` monic) to
/// `f = g * h mod 2^m` with `g` monic, `[g] = g1` and `[h] = h1`.
///
/// Each round doubles the exponent of the modulus and lifts the Bezout
/// cofactors alongside the factors.
pub fn hensel_split(f: &RatPoly, g1: &F2Poly, h1: &F2Poly, m: u32) -> Result<HenselSplit> {
    if m == 0 {
        return Err(Error::Precondition("precision must be positive".into()));
    }
    let deg = f.degree().ok_or(Error::ZeroPolynomial)?;
    let fm = residues(f, m)?;
    if fm.degree() != Some(deg) || fm.0[deg].is_even() {
        return Err(Error::Precondition(
            "leading coefficient of f must be a 2-adic unit".into(),
        ));
    }
    if fm.to_f2() != g1.mul(h1) {
        return Err(Error::Precondition("[f] differs from g1 * h1".into()));
    }
    let (gcd, s2, t2) = g1.ext_gcd(h1);
    if !gcd.is_one() {
        return Err(Error::NotCoprime);
    }
    // s2 * g1 + t2 * h1 = 1; normalize so deg t < deg g1 and deg s < deg h1.
    let (q, t2) = t2.div_rem(g1);
    let s2 = s2.add(&q.mul(h1));

    // Notation of the classical step: `a` is the monic factor, `b` the other,
    // with `sb * b + sa * a = 1`, deg sb < deg a, deg sa < deg b.
    let mut a = ModPoly::from_f2(g1);
    let mut b = ModPoly::from_f2(h1);
    let mut sb = ModPoly::from_f2(&t2);
    let mut sa = ModPoly::from_f2(&s2);
    let mut k = 1u32;
    while k < m {
        let k2 = 2 * k;
        let modulus = pow2_big(k2);
        let fk = residues(f, k2)?;
        let e = fk.sub(&b.mul(&a, &modulus), &modulus);
        let (qq, r) = sb.mul(&e, &modulus).div_rem_monic(&a, &modulus);
        let b_new = b
            .add(&sa.mul(&e, &modulus), &modulus)
            .add(&qq.mul(&b, &modulus), &modulus);
        let a_new = a.add(&r, &modulus);
        let one = ModPoly(vec![BigInt::one()]);
        let beta = sb
            .mul(&b_new, &modulus)
            .add(&sa.mul(&a_new, &modulus), &modulus)
            .sub(&one, &modulus);
        let (c, dd) = sb.mul(&beta, &modulus).div_rem_monic(&a_new, &modulus);
        let sb_new = sb.sub(&dd, &modulus);
        let sa_new = sa
            .sub(&sa.mul(&beta, &modulus), &modulus)
            .sub(&c.mul(&b_new, &modulus), &modulus);
        a = a_new;
        b = b_new;
        sb = sb_new;
        sa = sa_new;
        k = k2;
    }
    let modulus = pow2_big(m);
    let split = HenselSplit {
        precision: m,
        g: a.reduce(&modulus).to_ratpoly(),
        h: b.reduce(&modulus).to_ratpoly(),
    };
    debug_assert!(split.verify(f, g1, h1));
    Ok(split)
}
