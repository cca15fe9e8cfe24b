//! Sylvester resultants and discriminants.
//!
//! Rows hold coefficients in ascending order: the first `n` rows are shifted
//! copies of `f` (formal degree `m`), the last `m` rows shifted copies of `g`
//! (formal degree `n`). Only vanishing of these quantities is used downstream,
//! so no sign or leading-coefficient normalization is applied.

use num_traits::{One, Zero};

use super::matrix::determinant;
use super::{int, RatPoly, Rational};
use crate::error::{Error, Result};

/// Determinant of the Sylvester matrix with formal degrees `a.len() - 1` and
/// `b.len() - 1`; leading entries are allowed to vanish.
fn sylvester_det(a: &[Rational], b: &[Rational]) -> Rational {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    if size == 0 {
        return Rational::one();
    }
    let mut rows = vec![vec![Rational::zero(); size]; size];
    for i in 0..n {
        for (k, c) in a.iter().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for j in 0..m {
        for (k, c) in b.iter().enumerate() {
            rows[n + j][j + k] = c.clone();
        }
    }
    determinant(rows)
}

pub fn sylvester_resultant(f: &RatPoly, g: &RatPoly) -> Result<Rational> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(sylvester_det(f.coeffs(), g.coeffs()))
}

/// The resultant of `f` and `f'`.
pub fn discriminant(f: &RatPoly) -> Result<Rational> {
    match f.degree() {
        None => Err(Error::ZeroPolynomial),
        Some(0) => Err(Error::ConstantPolynomial),
        Some(_) => Ok(sylvester_det(f.coeffs(), f.derivative().coeffs())),
    }
}

/// Nonzero constants count as square-free; the zero polynomial does not.
pub fn is_squarefree(f: &RatPoly) -> bool {
    match f.degree() {
        None => false,
        Some(0) => true,
        Some(_) => !discriminant(f).expect("degree >= 1").is_zero(),
    }
}

/// `disc_x(lambda * f + g)` as a polynomial in `lambda`.
///
/// The Sylvester matrix is taken with the formal degrees `d` and `d - 1`, so
/// its entries are affine in `lambda` and the determinant has degree at most
/// `2d - 1`; it is sampled at `2d` integer points and interpolated exactly.
pub fn parametric_discriminant(f: &RatPoly, g: &RatPoly) -> Result<RatPoly> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d == 0 {
        return Err(Error::ConstantPolynomial);
    }
    if !is_squarefree(f) {
        return Err(Error::NotSquarefree);
    }
    if g.degree().is_some_and(|e| e > d) {
        return Err(Error::Precondition(
            "deg g must not exceed deg f".into(),
        ));
    }
    let fd = f.derivative();
    let gd = g.derivative();
    let points: Vec<Rational> = (0..2 * d as i64).map(int).collect();
    let values: Vec<Rational> = points
        .iter()
        .map(|lam| {
            let p: Vec<Rational> = (0..=d).map(|i| lam * f.coeff(i) + g.coeff(i)).collect();
            let q: Vec<Rational> = (0..d).map(|i| lam * fd.coeff(i) + gd.coeff(i)).collect();
            sylvester_det(&p, &q)
        })
        .collect();
    Ok(interpolate(&points, &values))
}

/// Lagrange interpolation through distinct nodes.
pub(crate) fn interpolate(xs: &[Rational], ys: &[Rational]) -> RatPoly {
    let mut acc = RatPoly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = RatPoly::constant(yi.clone());
        for (j, xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let lin = RatPoly::from_coeffs(vec![-xj.clone(), Rational::one()]);
            basis = (&basis * &lin).scale(&(xi - xj).recip());
        }
        acc = &acc + &basis;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::from_ints(c)
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(sylvester_resultant(&p(&[1, 0, 1]), &p(&[0, 2])).unwrap(), int(4));
        assert_eq!(sylvester_resultant(&p(&[-1, 1]), &p(&[-2, 1])).unwrap(), int(1));
        assert_eq!(sylvester_resultant(&p(&[0, 1]), &p(&[0, 1])).unwrap(), int(0));
        assert!(sylvester_resultant(&RatPoly::zero(), &p(&[1])).is_err());
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&p(&[1, 0, 1])).unwrap(), int(4));
        assert_eq!(discriminant(&p(&[0, 0, 1])).unwrap(), int(0));
        assert_ne!(discriminant(&p(&[2, -3, 1])).unwrap(), int(0));
        assert_eq!(discriminant(&p(&[5])), Err(Error::ConstantPolynomial));
    }

    #[test]
    fn squarefree_examples() {
        assert!(is_squarefree(&p(&[1, 0, 1])));
        assert!(!is_squarefree(&p(&[0, 0, 1])));
        assert!(is_squarefree(&p(&[9, 0, 0, 4, 0, 0, 4])));
    }

    #[test]
    fn parametric_examples() {
        // disc(lambda x + 1) = lambda
        let pd = parametric_discriminant(&p(&[0, 1]), &p(&[1])).unwrap();
        assert_eq!(pd, p(&[0, 1]));
        // disc(lambda x^2 + lambda) = 4 lambda^3
        let pd = parametric_discriminant(&p(&[1, 0, 1]), &RatPoly::zero()).unwrap();
        assert_eq!(pd, p(&[0, 0, 0, 4]));
        assert_eq!(pd.leading_coeff(), discriminant(&p(&[1, 0, 1])).unwrap());
        assert_eq!(
            parametric_discriminant(&p(&[0, 0, 1]), &p(&[1])),
            Err(Error::NotSquarefree)
        );
    }

    #[test]
    fn parametric_matches_direct_evaluation() {
        let f = p(&[1, 1, 0, 2]);
        let g = p(&[-3, 0, 1, -1]);
        let pd = parametric_discriminant(&f, &g).unwrap();
        for lam in [-3i64, 7, 11] {
            let h = &f.scale(&int(lam)) + &g;
            assert_eq!(pd.evaluate(&int(lam)), discriminant(&h).unwrap());
        }
        assert_eq!(pd.leading_coeff(), discriminant(&f).unwrap());
    }
}
