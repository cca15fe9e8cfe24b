//! 2-adic Newton diagrams, purity, and the irreducibility and factor-degree
//! consequences of a single-segment diagram.
//!
//! Factor-degree rule: if `f` is pure with slope `r/s` in lowest terms, every
//! irreducible factor of `f` over `Q_2` has a single-segment diagram of the
//! same slope. Its endpoints are lattice points, so its degree `n` satisfies
//! `n * r / s` integral, i.e. `s | n`. With `s = deg f` this is the
//! generalized Eisenstein criterion.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::valuation;
use crate::ratpoly::RatPoly;

/// `(i, ord_2(c_i))`; the valuation of a zero coefficient is `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationPoint {
    pub index: usize,
    pub valuation: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: (usize, i64),
    pub end: (usize, i64),
    #[serde(serialize_with = "ser_ratio")]
    pub slope: Ratio<i64>,
    pub lattice_length: u64,
}

impl Segment {
    pub fn rise(&self) -> i64 {
        self.end.1 - self.start.1
    }

    pub fn run(&self) -> i64 {
        (self.end.0 - self.start.0) as i64
    }
}

fn ser_ratio<S: Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *r.denom() == 1 {
        s.serialize_str(&r.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonDiagram {
    pub points: Vec<ValuationPoint>,
    pub vertices: Vec<(usize, i64)>,
    pub segments: Vec<Segment>,
}

impl NewtonDiagram {
    pub fn constant_nonzero(&self) -> bool {
        self.points.first().is_some_and(|p| p.valuation.is_some())
    }

    pub fn is_pure(&self) -> bool {
        is_pure(self, self.constant_nonzero())
    }

    /// `true` when `(x, y)` lies on or above every segment line.
    pub fn lies_on_or_above(&self, x: usize, y: i64) -> bool {
        self.segments.iter().all(|s| {
            // (y - y0) * run >= rise * (x - x0)
            (y - s.start.1) * s.run() >= s.rise() * (x as i64 - s.start.0 as i64)
        })
    }
}

fn cross(o: (usize, i64), a: (usize, i64), b: (usize, i64)) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    (a.0 as i128 - ox) * (b.1 as i128 - oy) - (a.1 as i128 - oy) * (b.0 as i128 - ox)
}

/// Lower convex hull of the valuation points; collinear interior points are
/// not vertices.
pub fn newton_diagram(f: &RatPoly) -> NewtonDiagram {
    let points: Vec<ValuationPoint> = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(index, c)| ValuationPoint {
            index,
            valuation: valuation(c),
        })
        .collect();
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for p in points.iter().filter_map(|p| p.valuation.map(|v| (p.index, v))) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let segments = hull
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let run = (b.0 - a.0) as i64;
            let rise = b.1 - a.1;
            Segment {
                start: a,
                end: b,
                slope: Ratio::new(rise, run),
                lattice_length: rise.unsigned_abs().gcd(&(run as u64)),
            }
        })
        .collect();
    NewtonDiagram {
        points,
        vertices: hull,
        segments,
    }
}

/// Nonzero constant term and a single-segment diagram.
pub fn is_pure(d: &NewtonDiagram, f0_nonzero: bool) -> bool {
    f0_nonzero && d.segments.len() == 1
}

/// Generalized Eisenstein criterion: pure, with the segment's rise coprime to
/// the degree. A `true` answer proves irreducibility over `Q_2`; `false` is
/// silent.
pub fn eisenstein_irreducible(f: &RatPoly) -> bool {
    let Some(deg) = f.degree() else {
        return false;
    };
    if deg == 0 {
        return false;
    }
    let d = newton_diagram(f);
    if !d.is_pure() {
        return false;
    }
    let seg = &d.segments[0];
    seg.rise().unsigned_abs().gcd(&(deg as u64)) == 1
}

/// Reduced denominator `e` of the slope of a pure diagram; every `Q_2`
/// irreducible factor of the polynomial has degree divisible by `e`.
pub fn factor_degree_divisor(d: &NewtonDiagram) -> Result<u64> {
    if !d.is_pure() {
        return Err(Error::Precondition("Newton diagram is not pure".into()));
    }
    Ok(*d.segments[0].slope.denom() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{int, pow2, rat};

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::from_ints(c)
    }

    #[test]
    fn diagram_examples() {
        let d = newton_diagram(&p(&[2, 0, 1]));
        assert_eq!(d.vertices, vec![(0, 1), (2, 0)]);
        assert_eq!(d.segments.len(), 1);
        assert_eq!(d.segments[0].slope, Ratio::new(-1, 2));
        assert_eq!(d.points[1].valuation, None);

        let d = newton_diagram(&RatPoly::from_coeffs(vec![rat(3, 4), int(0), int(2)]));
        assert_eq!(d.vertices, vec![(0, -2), (2, 1)]);
    }

    #[test]
    fn purity_examples() {
        assert!(newton_diagram(&p(&[2, 0, 1])).is_pure());
        assert!(newton_diagram(&p(&[1, 1, 1])).is_pure());
        let d = newton_diagram(&p(&[4, 2, 0, 1]));
        assert_eq!(d.vertices, vec![(0, 2), (1, 1), (3, 0)]);
        assert!(!d.is_pure());
        assert!(!newton_diagram(&p(&[0, 1, 1])).is_pure());
    }

    #[test]
    fn eisenstein_examples() {
        assert!(eisenstein_irreducible(&p(&[2, 0, 1])));
        assert!(eisenstein_irreducible(&RatPoly::from_coeffs(vec![
            rat(3, 4),
            int(0),
            int(2)
        ])));
        assert!(!eisenstein_irreducible(&p(&[1, 1, 1])));
        assert!(!eisenstein_irreducible(&p(&[5])));
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(factor_degree_divisor(&newton_diagram(&p(&[2, 0, 1]))).unwrap(), 2);
        assert_eq!(factor_degree_divisor(&newton_diagram(&p(&[1, 1, 1]))).unwrap(), 1);
        // endpoints (0, -2 l0), (4 d0, 2k) with d0 = 1, k = 1, l0 = 2: gcd(2, 3) = 1
        let f = RatPoly::from_coeffs(vec![pow2(-4), int(0), int(0), int(0), int(4)]);
        assert_eq!(factor_degree_divisor(&newton_diagram(&f)).unwrap(), 2);
        assert!(factor_degree_divisor(&newton_diagram(&p(&[4, 2, 0, 1]))).is_err());
    }

    #[test]
    fn counterexample_family_diagram() {
        // f_{0,65} - 2^{-12}: endpoints (0, -12) and (2, 2).
        let f = RatPoly::from_coeffs(vec![rat(4, 4225), rat(1, 4225), rat(4, 4225)]);
        let g = &f - &RatPoly::constant(pow2(-12));
        let d = newton_diagram(&g);
        assert_eq!(d.vertices.first(), Some(&(0, -12)));
        assert_eq!(d.vertices.last(), Some(&(2, 2)));
    }
}
