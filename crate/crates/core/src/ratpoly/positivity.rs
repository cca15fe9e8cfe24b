//! Real-root counting through the Hankel matrix of power sums, and certified
//! positivity on the real line.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::matrix::{rank_signature, SymMatrix};
use super::{int, is_squarefree, pow2, RatPoly, Rational};
use crate::error::{Error, Result};

/// Halving steps allowed in the epsilon searches before giving up.
pub const DEFAULT_SEARCH_DEPTH: u32 = 512;

/// Power sums `s_0 .. s_{2d-2}` of the complex roots of `f`.
pub fn power_sums(f: &RatPoly) -> Result<Vec<Rational>> {
    let d = match f.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::ConstantPolynomial),
        Some(d) => d,
    };
    let c = f.coeffs();
    let lc_inv = c[d].recip();
    let mut s = Vec::with_capacity(2 * d - 1);
    s.push(int(d as i64));
    for k in 1..=2 * d - 2 {
        let mut acc = if k < d {
            int(k as i64) * &c[d - k]
        } else {
            Rational::zero()
        };
        for i in 1..=k.min(d) {
            if k < d && i == k {
                break;
            }
            acc += &c[d - i] * &s[k - i];
        }
        s.push(-acc * &lc_inv);
    }
    Ok(s)
}

/// `S_f[i][j] = s_{i+j}`.
pub fn hankel_matrix(f: &RatPoly) -> Result<SymMatrix> {
    let s = power_sums(f)?;
    let d = f.degree().expect("checked by power_sums");
    let rows = (0..d)
        .map(|i| (0..d).map(|j| s[i + j].clone()).collect())
        .collect();
    SymMatrix::new(rows)
}

/// `(distinct complex roots, distinct real roots)` as rank and signature of
/// the Hankel matrix.
pub fn count_distinct_and_real_roots(f: &RatPoly) -> Result<(usize, i64)> {
    Ok(rank_signature(&hankel_matrix(f)?))
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut prev = 0i8;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if prev != 0 && s != prev {
            n += 1;
        }
        prev = s;
    }
    n
}

fn sgn(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Number of real roots by sign variations of the Sturm chain at the two
/// infinities.
pub fn sturm_real_root_count(f: &RatPoly) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !is_squarefree(f) {
        return Err(Error::NotSquarefree);
    }
    let mut chain = vec![f.clone(), f.derivative()];
    while !chain.last().expect("nonempty").is_zero() {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1])?;
        chain.push(-&r);
    }
    chain.pop();
    let at_pos = chain.iter().map(|p| sgn(&p.leading_coeff()));
    let at_neg = chain.iter().map(|p| {
        let s = sgn(&p.leading_coeff());
        if p.degree().unwrap_or(0) % 2 == 1 {
            -s
        } else {
            s
        }
    });
    Ok(sign_changes(at_neg) - sign_changes(at_pos))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
}

impl Sign {
    fn of(q: &Rational) -> Sign {
        match sgn(q) {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => Sign::Zero,
        }
    }
}

/// Evidence for (or against) strict positivity on the real line.
///
/// `rank` and `signature` refer to the Hankel matrix of the square-free part
/// `f / gcd(f, f')`, whose degree is `squarefree_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositivityCertificate {
    pub degree: usize,
    pub squarefree_degree: usize,
    pub rank: usize,
    pub signature: i64,
    pub leading_sign: Sign,
    pub constant_sign: Sign,
    pub verdict: bool,
}

pub fn is_positive_on_reals(f: &RatPoly) -> PositivityCertificate {
    let Some(d) = f.degree() else {
        return PositivityCertificate {
            degree: 0,
            squarefree_degree: 0,
            rank: 0,
            signature: 0,
            leading_sign: Sign::Zero,
            constant_sign: Sign::Zero,
            verdict: false,
        };
    };
    let sqf = f.squarefree_part();
    let sd = sqf.degree().expect("nonzero");
    let (rank, signature) = if sd == 0 {
        (0, 0)
    } else {
        count_distinct_and_real_roots(&sqf).expect("degree >= 1")
    };
    let leading_sign = Sign::of(&f.leading_coeff());
    let constant_sign = Sign::of(&f.constant_term());
    let verdict = d % 2 == 0
        && leading_sign == Sign::Positive
        && constant_sign == Sign::Positive
        && signature == 0;
    PositivityCertificate {
        degree: d,
        squarefree_degree: sd,
        rank,
        signature,
        leading_sign,
        constant_sign,
        verdict,
    }
}

fn positive(f: &RatPoly) -> bool {
    is_positive_on_reals(f).verdict
}

/// A dyadic `eps > 0` with `f - eps` still positive on the real line.
pub fn epsilon_below_infimum(f: &RatPoly) -> Result<Rational> {
    epsilon_below_infimum_with_depth(f, DEFAULT_SEARCH_DEPTH)
}

pub fn epsilon_below_infimum_with_depth(f: &RatPoly, depth: u32) -> Result<Rational> {
    if !positive(f) {
        return Err(Error::NotPositive);
    }
    let start = f.constant_term().min(Rational::one());
    let mut j = 0i64;
    while pow2(-j) > start {
        j += 1;
    }
    for _ in 0..=depth {
        let eps = pow2(-j);
        if positive(&(f - &RatPoly::constant(eps.clone()))) {
            return Ok(eps);
        }
        j += 1;
    }
    Err(Error::SearchExhausted(format!(
        "no verified epsilon after {depth} halvings"
    )))
}

/// A dyadic `eps_0 > 0` with `f + eps_0 * g` positive on the real line.
///
/// The admissible set `{eps >= 0 : f + eps g > 0}` is convex (an intersection
/// of half-lines, one per real point), so every `0 < eps <= eps_0` also works.
pub fn perturbation_bound(f: &RatPoly, g: &RatPoly) -> Result<Rational> {
    perturbation_bound_with_depth(f, g, DEFAULT_SEARCH_DEPTH)
}

pub fn perturbation_bound_with_depth(f: &RatPoly, g: &RatPoly, depth: u32) -> Result<Rational> {
    if !is_squarefree(f) {
        return Err(Error::NotSquarefree);
    }
    if !positive(f) {
        return Err(Error::NotPositive);
    }
    if g.degree() > f.degree() {
        return Err(Error::Precondition("deg g must not exceed deg f".into()));
    }
    if g.is_zero() {
        return Ok(Rational::one());
    }
    for j in 0..=depth as i64 {
        let eps = pow2(-j);
        if positive(&(f + &g.scale(&eps))) {
            return Ok(eps);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no verified perturbation bound after {depth} halvings"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::rat;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::from_ints(c)
    }

    fn f0_65() -> RatPoly {
        RatPoly::from_coeffs(vec![rat(4, 4225), rat(1, 4225), rat(4, 4225)])
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sums(&p(&[1, 0, 1])).unwrap(), vec![int(2), int(0), int(-2)]);
        assert_eq!(power_sums(&p(&[2, -3, 1])).unwrap(), vec![int(2), int(3), int(5)]);
        assert_eq!(power_sums(&p(&[1, -2, 1])).unwrap(), vec![int(2), int(2), int(2)]);
        assert_eq!(power_sums(&p(&[3])), Err(Error::ConstantPolynomial));
    }

    #[test]
    fn power_sums_cubic_by_hand() {
        // roots 1, 2, 3: s_k = 1 + 2^k + 3^k
        let f = p(&[-6, 11, -6, 1]);
        let s = power_sums(&f).unwrap();
        let expect: Vec<Rational> = (0..5).map(|k| int(1 + 2i64.pow(k) + 3i64.pow(k))).collect();
        assert_eq!(s, expect);
    }

    #[test]
    fn hankel_examples() {
        let h = hankel_matrix(&p(&[1, 0, 1])).unwrap();
        assert_eq!(h, SymMatrix::from_ints(&[&[2, 0], &[0, -2]]).unwrap());
        let h = hankel_matrix(&p(&[2, -3, 1])).unwrap();
        assert_eq!(h, SymMatrix::from_ints(&[&[2, 3], &[3, 5]]).unwrap());
        let h = hankel_matrix(&p(&[-5, 1])).unwrap();
        assert_eq!(h, SymMatrix::from_ints(&[&[1]]).unwrap());
    }

    #[test]
    fn root_count_examples() {
        assert_eq!(count_distinct_and_real_roots(&p(&[1, 0, 1])).unwrap(), (2, 0));
        assert_eq!(count_distinct_and_real_roots(&p(&[2, -3, 1])).unwrap(), (2, 2));
        assert_eq!(count_distinct_and_real_roots(&p(&[1, -2, 1])).unwrap(), (1, 1));
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_real_root_count(&p(&[1, 0, 1])).unwrap(), 0);
        assert_eq!(sturm_real_root_count(&p(&[2, -3, 1])).unwrap(), 2);
        assert_eq!(sturm_real_root_count(&p(&[0, -1, 0, 1])).unwrap(), 3);
        assert_eq!(sturm_real_root_count(&p(&[1, -2, 1])), Err(Error::NotSquarefree));
    }

    #[test]
    fn positivity_examples() {
        assert!(is_positive_on_reals(&p(&[1, 0, 1])).verdict);
        let c = is_positive_on_reals(&p(&[-1, 0, 1]));
        assert!(!c.verdict);
        assert_eq!(c.signature, 2);
        assert!(is_positive_on_reals(&f0_65()).verdict);
        // (x^2 + 1)^2 is positive; (x - 1)^2 (x^2 + 1) is not.
        let c = is_positive_on_reals(&p(&[1, 0, 1]).pow(2));
        assert!(c.verdict);
        assert_eq!(c.squarefree_degree, 2);
        assert!(!is_positive_on_reals(&(&p(&[-1, 1]).pow(2) * &p(&[1, 0, 1]))).verdict);
        assert!(!is_positive_on_reals(&p(&[0, 0, 1])).verdict);
        assert!(!is_positive_on_reals(&RatPoly::zero()).verdict);
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_below_infimum(&p(&[1, 0, 1])).unwrap(), rat(1, 2));
        let eps = epsilon_below_infimum(&f0_65()).unwrap();
        assert!(eps < rat(63, 16 * 4225));
        assert!(eps > int(0));
        let eps = epsilon_below_infimum(&p(&[1, 0, 2, 0, 1])).unwrap();
        assert!(eps <= rat(1, 2));
        assert_eq!(epsilon_below_infimum(&p(&[-1, 0, 1])), Err(Error::NotPositive));
    }

    #[test]
    fn perturbation_examples() {
        let e = perturbation_bound(&p(&[1, 0, 1]), &p(&[-1])).unwrap();
        assert!(e <= rat(1, 2));
        assert!(is_positive_on_reals(&(&p(&[1, 0, 1]) - &RatPoly::constant(e))).verdict);

        let f = p(&[1, 0, 1, 0, 1]);
        let g = -&p(&[1, 1, 1]).pow(2);
        let e = perturbation_bound(&f, &g).unwrap();
        assert!(is_positive_on_reals(&(&f + &g.scale(&e))).verdict);
        // 1/16 is admissible: 16 f - (x^2 + x + 1)^2 > 0
        assert!(is_positive_on_reals(&(&f.scale(&int(16)) + &g)).verdict);

        assert_eq!(perturbation_bound(&p(&[1, 0, 1]), &RatPoly::zero()).unwrap(), int(1));
    }
}
