//! Exact univariate polynomials over the rationals.
//!
//! Coefficients are stored densely in ascending degree order and kept
//! normalized: the highest stored coefficient is nonzero unless the
//! polynomial is zero, in which case the vector is empty.

mod matrix;
mod positivity;
mod resultant;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use matrix::{determinant, rank_signature, SymMatrix};
pub use positivity::{
    count_distinct_and_real_roots, epsilon_below_infimum, epsilon_below_infimum_with_depth,
    hankel_matrix, is_positive_on_reals, perturbation_bound, perturbation_bound_with_depth,
    power_sums, sturm_real_root_count, PositivityCertificate, Sign, DEFAULT_SEARCH_DEPTH,
};
pub use resultant::{discriminant, is_squarefree, parametric_discriminant, sylvester_resultant};

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `2^e` for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(0)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Horner evaluation.
    pub fn evaluate(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn make_monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.leading_coeff().recip())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Returns `g` with `g(t) = f(t + a)`.
    pub fn shift(&self, a: &Rational) -> Self {
        let lin = Self::from_coeffs(vec![a.clone(), Rational::one()]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * &lin) + &Self::constant(c.clone())
        })
    }

    /// Coefficient reversal relative to the degree: `x^d f(1/x)`.
    pub fn reverse(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().rev().cloned().collect())
    }

    /// Euclidean division.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lc_inv = divisor.leading_coeff().recip();
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let q = &rem[k + dd] * &lc_inv;
            if q.is_zero() {
                continue;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &q * c;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Precondition("division is not exact".into()));
        }
        Ok(q)
    }

    /// Monic greatest common divisor; zero only when both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// `f / gcd(f, f')`, monic up to the leading coefficient of `f`.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides")
    }

    /// Yun's square-free decomposition: `f = c * prod p_i^{m_i}` with monic,
    /// square-free, pairwise coprime `p_i`. Returns `(c, [(p_i, m_i)])`.
    pub fn squarefree_decomposition(&self) -> (Rational, Vec<(RatPoly, usize)>) {
        if self.is_zero() {
            return (Rational::zero(), Vec::new());
        }
        let lc = self.leading_coeff();
        let f = self.make_monic();
        if f.degree() == Some(0) {
            return (lc, Vec::new());
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.exact_div(&a0).expect("gcd divides");
        let c = df.exact_div(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            let nb = b.exact_div(&a).expect("gcd divides");
            let nc = d.exact_div(&a).expect("gcd divides");
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            d = &nc - &nb.derivative();
            b = nb;
            i += 1;
        }
        (lc, out)
    }

    /// Splits `f = s^2 * g` where `g` collects the odd-multiplicity factors.
    pub fn split_square(&self) -> (RatPoly, RatPoly) {
        let (lc, parts) = self.squarefree_decomposition();
        let mut s = Self::one();
        let mut g = Self::constant(lc);
        for (p, m) in parts {
            s = &s * &p.pow((m / 2) as u32);
            if m % 2 == 1 {
                g = &g * &p;
            }
        }
        (s, g)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Integer coefficients of `D * f` where `D` is the denominator lcm.
    pub fn to_integer_coeffs(&self) -> (BigInt, Vec<BigInt>) {
        let d = self.denominator_lcm();
        let cs = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(d.clone())).to_integer())
            .collect();
        (d, cs)
    }

    /// Human-readable form, e.g. `4/4225*x^2 + 1/4225*x + 4/4225`.
    pub fn to_human(&self) -> String {
        self.to_string()
    }
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Exact rational as `num/den` (or `num` when integral).
pub fn rational_to_string(c: &Rational) -> String {
    fmt_rational(c)
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            if i == 0 {
                write!(f, "{}", fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_rational(&a))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a RatPoly> for &'a RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a RatPoly> for &'a RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a RatPoly> for &'a RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::from_coeffs(out)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RatPoly> for RatPoly {
            type Output = RatPoly;
            fn $m(self, rhs: RatPoly) -> RatPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::from_ints(c)
    }

    fn f0_65() -> RatPoly {
        RatPoly::from_coeffs(vec![rat(4, 4225), rat(1, 4225), rat(4, 4225)])
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(p(&[1, 0, 1]).evaluate(&int(0)), int(1));
        assert_eq!(p(&[1, 0, 1]).evaluate(&rat(1, 2)), rat(5, 4));
        assert_eq!(f0_65().evaluate(&int(0)), rat(4, 4225));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(p(&[0, 0, 1]).shift(&int(1)), p(&[1, 2, 1]));
        let f = p(&[3, -1, 4]);
        assert_eq!(f.shift(&int(0)), f);
        // N^2 f_{0,N}(x - 1) has constant term 4 - 1 + 4.
        let g = f0_65().scale(&int(4225)).shift(&int(-1));
        assert_eq!(g.constant_term(), int(7));
        assert_eq!(g.degree(), Some(2));
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(p(&[3, 2, 1]).reverse(), p(&[1, 2, 3]));
        assert_eq!(f0_65().reverse(), f0_65());
        assert_eq!(p(&[1, 0, 1]).reverse(), p(&[1, 0, 1]));
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[-1, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[1, 1])), p(&[1, 1]));
        assert!(a.div_rem(&RatPoly::zero()).is_err());
    }

    #[test]
    fn yun_decomposition() {
        // (x - 1)^3 (x + 2)^2 (x^2 + 1)
        let f = &(&p(&[-1, 1]).pow(3) * &p(&[2, 1]).pow(2)) * &p(&[1, 0, 1]);
        let f = f.scale(&int(5));
        let (c, parts) = f.squarefree_decomposition();
        assert_eq!(c, int(5));
        let mut rebuilt = RatPoly::constant(c);
        for (q, m) in &parts {
            rebuilt = &rebuilt * &q.pow(*m as u32);
        }
        assert_eq!(rebuilt, f);
        let (s, g) = f.split_square();
        assert_eq!(&(&s * &s) * &g, f);
        assert_eq!(g, (&p(&[-1, 1]) * &p(&[1, 0, 1])).scale(&int(5)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(f0_65().to_string(), "4/4225*x^2 + 1/4225*x + 4/4225");
        assert_eq!(p(&[-1, 0, -1]).to_string(), "-x^2 - 1");
        assert_eq!(RatPoly::zero().to_string(), "0");
    }
}
