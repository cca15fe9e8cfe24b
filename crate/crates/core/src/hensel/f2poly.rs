//! Polynomials over the two-element field, packed 64 coefficients per word.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct F2Poly {
    words: Vec<u64>,
}

impl F2Poly {
    pub fn zero() -> Self {
        F2Poly { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_bits(1)
    }

    pub fn x() -> Self {
        Self::from_bits(2)
    }

    /// Bit `i` of `bits` is the coefficient of `x^i`.
    pub fn from_bits(bits: u64) -> Self {
        let mut p = F2Poly { words: vec![bits] };
        p.trim();
        p
    }

    /// Ascending coefficients, each reduced mod 2.
    pub fn from_coeffs<I: IntoIterator<Item = bool>>(coeffs: I) -> Self {
        let mut p = Self::zero();
        for (i, c) in coeffs.into_iter().enumerate() {
            if c {
                p.set(i);
            }
        }
        p
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    pub fn bit(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    fn set(&mut self, i: usize) {
        if self.words.len() <= i / 64 {
            self.words.resize(i / 64 + 1, 0);
        }
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn flip(&mut self, i: usize) {
        if self.words.len() <= i / 64 {
            self.words.resize(i / 64 + 1, 0);
        }
        self.words[i / 64] ^= 1 << (i % 64);
        self.trim();
    }

    pub fn coeffs(&self) -> Vec<bool> {
        match self.degree() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|i| self.bit(i)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.words.len().max(other.words.len());
        let mut words: Vec<u64> = (0..n)
            .map(|i| self.words.get(i).unwrap_or(&0) ^ other.words.get(i).unwrap_or(&0))
            .collect();
        while words.last() == Some(&0) {
            words.pop();
        }
        F2Poly { words }
    }

    fn shl(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (ws, bs) = (k / 64, k % 64);
        let mut words = vec![0u64; self.words.len() + ws + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + ws] |= w << bs;
            if bs != 0 {
                words[i + ws + 1] |= w >> (64 - bs);
            }
        }
        let mut p = F2Poly { words };
        p.trim();
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc = Self::zero();
        if let Some(d) = other.degree() {
            for i in 0..=d {
                if other.bit(i) {
                    acc = acc.add(&self.shl(i));
                }
            }
        }
        acc
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            quot.flip(rd - dd);
            rem = rem.add(&divisor.shl(rd - dd));
        }
        (quot, rem)
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// `(g, s, t)` with `s * self + t * other = g = gcd(self, other)`.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.add(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.add(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        (r0, s0, t0)
    }

    pub fn derivative(&self) -> Self {
        let Some(d) = self.degree() else {
            return Self::zero();
        };
        Self::from_coeffs((1..=d).map(|i| i % 2 == 1 && self.bit(i)))
    }

    /// Square root of a polynomial whose odd coefficients vanish.
    fn sqrt(&self) -> Self {
        let Some(d) = self.degree() else {
            return Self::zero();
        };
        Self::from_coeffs((0..=d / 2).map(|i| self.bit(2 * i)))
    }

    fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        self.mul(other).rem(m)
    }

    /// Irreducible factors with multiplicities, sorted by degree then
    /// coefficients.
    pub fn factor(&self) -> Vec<(F2Poly, usize)> {
        assert!(!self.is_zero(), "cannot factor the zero polynomial");
        let mut out = Vec::new();
        for (sqf, mult) in self.squarefree_factorization() {
            for (part, deg) in sqf.distinct_degree_factorization() {
                for irr in part.equal_degree_factorization(deg) {
                    out.push((irr, mult));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        out
    }

    fn squarefree_factorization(&self) -> Vec<(F2Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let mut c = self.gcd(&self.derivative());
        let mut w = self.div_rem(&c).0;
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.div_rem(&y).0;
            if !fac.is_one() {
                out.push((fac, i));
            }
            w = y.clone();
            c = c.div_rem(&y).0;
            i += 1;
        }
        if !c.is_one() {
            for (g, m) in c.sqrt().squarefree_factorization() {
                out.push((g, 2 * m));
            }
        }
        out
    }

    fn distinct_degree_factorization(&self) -> Vec<(F2Poly, usize)> {
        let mut out = Vec::new();
        let mut rest = self.clone();
        let mut h = Self::x();
        let mut i = 1;
        while rest.degree().unwrap_or(0) >= 2 * i {
            h = h.mul_mod(&h, &rest);
            let g = rest.gcd(&h.add(&Self::x()));
            if !g.is_one() {
                rest = rest.div_rem(&g).0;
                h = h.rem(&rest);
                out.push((g, i));
            }
            i += 1;
        }
        if rest.degree().unwrap_or(0) > 0 {
            let d = rest.degree().expect("nonzero");
            out.push((rest, d));
        }
        out
    }

    /// Splits a product of distinct irreducibles of degree `d` with the trace
    /// map `a + a^2 + ... + a^(2^(d-1))`, trying `a` in a fixed order.
    fn equal_degree_factorization(&self, d: usize) -> Vec<F2Poly> {
        let n = self.degree().expect("nonzero");
        if n == d {
            return vec![self.clone()];
        }
        let mut a_bits = 2u64;
        loop {
            let a = Self::from_bits(a_bits).rem(self);
            a_bits += 1;
            let mut t = a.clone();
            let mut acc = a;
            for _ in 1..d {
                t = t.mul_mod(&t, self);
                acc = acc.add(&t);
            }
            let g = self.gcd(&acc);
            let gd = g.degree().unwrap_or(0);
            if gd > 0 && gd < n {
                let h = self.div_rem(&g).0;
                let mut out = g.equal_degree_factorization(d);
                out.extend(h.equal_degree_factorization(d));
                return out;
            }
        }
    }
}

impl Ord for F2Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for F2Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else {
            return write!(f, "0");
        };
        let terms: Vec<String> = (0..=d)
            .rev()
            .filter(|&i| self.bit(i))
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Poly({self})")
    }
}

impl Serialize for F2Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u64) -> F2Poly {
        F2Poly::from_bits(bits)
    }

    #[test]
    fn arithmetic() {
        // (x + 1)^2 = x^2 + 1
        assert_eq!(p(0b11).mul(&p(0b11)), p(0b101));
        let (q, r) = p(0b10011).div_rem(&p(0b111));
        assert_eq!(q.mul(&p(0b111)).add(&r), p(0b10011));
        assert_eq!(p(0b111).degree(), Some(2));
        assert_eq!(F2Poly::zero().degree(), None);
        let big = F2Poly::x().pow(130).add(&F2Poly::one());
        assert_eq!(big.degree(), Some(130));
        let (g, s, t) = p(0b111).ext_gcd(&p(0b100));
        assert!(g.is_one());
        assert_eq!(s.mul(&p(0b111)).add(&t.mul(&p(0b100))), F2Poly::one());
    }

    #[test]
    fn factor_examples() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert_eq!(p(0b10101).factor(), vec![(p(0b111), 2)]);
        assert_eq!(p(0b110).factor(), vec![(p(0b10), 1), (p(0b11), 1)]);
        // (x^2 + x + 1)^4 * x^2
        let f = p(0b111).pow(4).mul(&p(0b100));
        assert_eq!(f.factor(), vec![(p(0b10), 2), (p(0b111), 4)]);
        // x^3 + x + 1 is irreducible
        assert_eq!(p(0b1011).factor(), vec![(p(0b1011), 1)]);
    }

    #[test]
    fn factors_reconstruct() {
        for bits in 1u64..2048 {
            let f = p(bits);
            let mut acc = F2Poly::one();
            for (g, m) in f.factor() {
                // each factor is irreducible: no proper factor of lower degree
                let gd = g.degree().unwrap();
                assert!(gd >= 1);
                for cand in 2u64..(1 << (gd / 2 + 1)) {
                    let c = p(cand);
                    if c.degree().unwrap() >= 1 && c.degree().unwrap() <= gd / 2 {
                        assert!(!g.rem(&c).is_zero(), "{g} divisible by {c}");
                    }
                }
                acc = acc.mul(&g.pow(m));
            }
            assert_eq!(acc, f, "bits {bits:b}");
        }
    }
}
