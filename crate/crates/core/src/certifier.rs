//! Three-valued decision of "sum of four squares in `Q[x]`".
//!
//! A positive polynomial is a sum of four squares iff every irreducible
//! factor over `Q_2` of odd multiplicity has even degree. The factorization
//! over `Q_2` is never computed in full. Instead a list of sufficient rules is
//! tried, each producing evidence that can be re-checked from scratch by
//! [`recheck`]. When no rule applies the verdict is `INCONCLUSIVE`.
//!
//! All structural rules act on the odd-multiplicity part `g` of `f = s^2 g`;
//! the split-witness rule acts on `f` itself.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hensel::{
    hensel_split, reduce_mod2, two_primitive, verify_root_status, z2_root_status, F2Poly,
    HenselSplit, RootStatus, DEFAULT_ROOT_BUDGET,
};
use crate::newton_polygon::{
    eisenstein_irreducible, factor_degree_divisor, newton_diagram, NewtonDiagram,
};
use crate::padic::is_square_in_q2;
use crate::ratpoly::{discriminant, is_positive_on_reals, PositivityCertificate, RatPoly, Rational};

/// Precision of the Hensel splits stored as evidence.
pub const EVIDENCE_PRECISION: u32 = 64;

/// Largest degree for which a split `f = A^2 + c` is searched automatically.
pub const MAX_SPLIT_SEARCH_DEGREE: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "SOS4")]
    Sos4,
    #[serde(rename = "NOT_SOS4")]
    NotSos4,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Sos4 => "SOS4",
            Verdict::NotSos4 => "NOT_SOS4",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// No conclusive rule, or `f` fails the positivity gate.
    None,
    /// The odd-multiplicity part is a positive constant.
    EvenMultiplicities,
    /// `f = (A - b)(A + b)` over `Q_2` with `b^2 = -c` and `deg A` odd.
    OddSquareSplit {
        a: RatPoly,
        #[serde(serialize_with = "crate::json::ser_rational")]
        c: Rational,
    },
    /// A simple root of `g` in `Q_2`.
    SimpleZ2Root {
        root: RootStatus,
        discriminant_nonzero: bool,
    },
    /// `g` is irreducible over `Q_2` (generalized Eisenstein) of even degree.
    EisensteinIrreducibleEvenDegree {
        degree: usize,
        diagram: NewtonDiagram,
    },
    /// `g` is pure and every factor degree is divisible by the even `e`.
    PureEvenDivisor { e: u64, diagram: NewtonDiagram },
    /// All irreducible factors of the mod-2 image of `g` have even degree.
    Mod2EvenDegrees {
        normalized: RatPoly,
        factors: Vec<(F2Poly, usize)>,
    },
    /// `g = G * H` over `Z_2` with `[G]` a product of even-degree factors,
    /// `deg H` in {2, 4}, and no root of `g` in `Q_2`.
    HenselEvenSplit {
        normalized: RatPoly,
        even_part: F2Poly,
        odd_part: F2Poly,
        split: HenselSplit,
        root: RootStatus,
    },
    /// `deg g` in {2, 4} and `g` has no root in `Q_2`.
    NoQ2RootLowDegree { degree: usize, root: RootStatus },
    /// The certificate of `f(x + shift)`, which transfers to `f`.
    Shifted {
        #[serde(serialize_with = "crate::json::ser_rational")]
        shift: Rational,
        inner: Box<Evidence>,
    },
}

impl Evidence {
    /// Verdict implied by the evidence alone.
    pub fn verdict(&self) -> Verdict {
        match self {
            Evidence::None => Verdict::Inconclusive,
            Evidence::OddSquareSplit { .. } | Evidence::SimpleZ2Root { .. } => Verdict::NotSos4,
            Evidence::Shifted { inner, .. } => inner.verdict(),
            _ => Verdict::Sos4,
        }
    }

    pub fn rule_name(&self) -> &'static str {
        match self {
            Evidence::None => "none",
            Evidence::EvenMultiplicities => "even_multiplicities",
            Evidence::OddSquareSplit { .. } => "rule_odd_split_witness",
            Evidence::SimpleZ2Root { .. } => "rule_simple_z2_root",
            Evidence::EisensteinIrreducibleEvenDegree { .. } => "rule_eisenstein",
            Evidence::PureEvenDivisor { .. } => "rule_pure_even_divisor",
            Evidence::Mod2EvenDegrees { .. } => "rule_mod2_even_degrees",
            Evidence::HenselEvenSplit { .. } => "rule_hensel_even_split",
            Evidence::NoQ2RootLowDegree { .. } => "rule_no_q2_root_low_degree",
            Evidence::Shifted { .. } => "shifted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sos4Certificate {
    pub verdict: Verdict,
    pub rule: String,
    pub positivity: PositivityCertificate,
    /// Odd-multiplicity part `g` of `f = s^2 g`.
    pub odd_part: RatPoly,
    pub evidence: Evidence,
}

impl Sos4Certificate {
    fn new(verdict: Verdict, positivity: PositivityCertificate, odd_part: RatPoly, evidence: Evidence) -> Self {
        let rule = if verdict == Verdict::NotSos4 && evidence == Evidence::None {
            "positivity_gate".to_string()
        } else {
            evidence.rule_name().to_string()
        };
        Sos4Certificate {
            verdict,
            rule,
            positivity,
            odd_part,
            evidence,
        }
    }

    /// Wraps a certificate of `f(x + shift)` as one for `f`.
    pub fn shifted(self, f: &RatPoly, shift: Rational) -> Self {
        let evidence = Evidence::Shifted {
            shift,
            inner: Box::new(self.evidence),
        };
        let (_, odd_part) = f.split_square();
        Sos4Certificate::new(self.verdict, is_positive_on_reals(f), odd_part, evidence)
    }
}

fn check_witness(f: &RatPoly, a: &RatPoly, c: &Rational) -> Result<()> {
    if &(a * a) + &RatPoly::constant(c.clone()) != *f {
        return Err(Error::WitnessMismatch(format!(
            "f differs from ({a})^2 + {c}"
        )));
    }
    Ok(())
}

/// `f = A^2 + c` with `deg A` odd and `-c` a square in `Q_2` gives
/// `f = (A - b)(A + b)` with coprime odd-degree factors, so some
/// odd-degree irreducible factor has odd multiplicity.
pub fn rule_odd_split_witness(f: &RatPoly, a: &RatPoly, c: &Rational) -> Result<Option<Evidence>> {
    check_witness(f, a, c)?;
    if c.is_zero() {
        return Err(Error::WitnessMismatch("c must be nonzero".into()));
    }
    let odd = a.degree().is_some_and(|d| d % 2 == 1);
    Ok((odd && is_square_in_q2(&-c)).then(|| Evidence::OddSquareSplit {
        a: a.clone(),
        c: c.clone(),
    }))
}

fn simple_root_evidence(g: &RatPoly, root: &RootStatus) -> Option<Evidence> {
    if !root.has_root() {
        return None;
    }
    let disc_nonzero = discriminant(g).is_ok_and(|d| !d.is_zero());
    disc_nonzero.then(|| Evidence::SimpleZ2Root {
        root: root.clone(),
        discriminant_nonzero: true,
    })
}

/// A certified root in `Q_2` of a square-free `g` is a linear factor of
/// multiplicity one.
pub fn rule_simple_z2_root(g: &RatPoly) -> Option<Evidence> {
    simple_root_evidence(g, &z2_root_status(g, DEFAULT_ROOT_BUDGET))
}

pub fn rule_eisenstein(g: &RatPoly) -> Option<Evidence> {
    let degree = g.degree()?;
    (degree % 2 == 0 && eisenstein_irreducible(g)).then(|| {
        Evidence::EisensteinIrreducibleEvenDegree {
            degree,
            diagram: newton_diagram(g),
        }
    })
}

pub fn rule_pure_even_divisor(g: &RatPoly) -> Option<Evidence> {
    g.degree().filter(|&d| d > 0)?;
    let diagram = newton_diagram(g);
    let e = factor_degree_divisor(&diagram).ok()?;
    (e % 2 == 0).then_some(Evidence::PureEvenDivisor { e, diagram })
}

/// Normalized integral form with a unit leading coefficient, else `None`.
fn unit_leading_form(g: &RatPoly) -> Option<RatPoly> {
    g.degree().filter(|&d| d > 0)?;
    let n = two_primitive(g);
    n.leading_coeff().numer().bit(0).then_some(n)
}

/// With a unit leading coefficient every monic factor over `Z_2` reduces to
/// a product of mod-2 factors of the same total degree.
pub fn rule_mod2_even_degrees(g: &RatPoly) -> Option<Evidence> {
    let normalized = unit_leading_form(g)?;
    let factors = reduce_mod2(&normalized).ok()?.factor();
    factors
        .iter()
        .all(|(p, _)| p.degree().is_some_and(|d| d % 2 == 0))
        .then_some(Evidence::Mod2EvenDegrees { normalized, factors })
}

fn split_even_odd(factors: &[(F2Poly, usize)]) -> (F2Poly, F2Poly) {
    let mut even = F2Poly::one();
    let mut odd = F2Poly::one();
    for (p, m) in factors {
        let part = p.pow(*m);
        if p.degree().unwrap_or(0) % 2 == 0 {
            even = even.mul(&part);
        } else {
            odd = odd.mul(&part);
        }
    }
    (even, odd)
}

fn hensel_even_split_with(g: &RatPoly, root: &RootStatus) -> Option<Evidence> {
    if !root.no_root() {
        return None;
    }
    let normalized = unit_leading_form(g)?;
    let factors = reduce_mod2(&normalized).ok()?.factor();
    let (even_part, odd_part) = split_even_odd(&factors);
    if even_part.is_one() || !matches!(odd_part.degree(), Some(2) | Some(4)) {
        return None;
    }
    let split = hensel_split(&normalized, &even_part, &odd_part, EVIDENCE_PRECISION).ok()?;
    Some(Evidence::HenselEvenSplit {
        normalized,
        even_part,
        odd_part,
        split,
        root: root.clone(),
    })
}

/// The factor lifting the even-degree mod-2 factors has only even-degree
/// irreducible factors. The other factor has degree 2 or 4 and no linear
/// factor, so its irreducible factors have even degree too.
pub fn rule_hensel_even_split(g: &RatPoly) -> Option<Evidence> {
    hensel_even_split_with(g, &z2_root_status(g, DEFAULT_ROOT_BUDGET))
}

fn low_degree_with(g: &RatPoly, root: &RootStatus) -> Option<Evidence> {
    let degree = g.degree()?;
    (matches!(degree, 2 | 4) && root.no_root()).then(|| Evidence::NoQ2RootLowDegree {
        degree,
        root: root.clone(),
    })
}

/// In degree 2 or 4 a polynomial without roots has only even-degree factors.
pub fn rule_no_q2_root_low_degree(g: &RatPoly) -> Option<Evidence> {
    low_degree_with(g, &z2_root_status(g, DEFAULT_ROOT_BUDGET))
}

fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

/// Bounded search for `f = A^2 + c` with `c` constant, solving for the
/// coefficients of `A` from the top down. Degrees above
/// [`MAX_SPLIT_SEARCH_DEGREE`] are not searched.
pub fn find_square_plus_constant(f: &RatPoly) -> Option<(RatPoly, Rational)> {
    let d = f.degree()?;
    if d == 0 || d % 2 == 1 || d > MAX_SPLIT_SEARCH_DEGREE {
        return None;
    }
    let n = d / 2;
    let mut a = vec![Rational::zero(); n + 1];
    a[n] = exact_sqrt(&f.leading_coeff())?;
    let two_lead = &a[n] * Rational::from_integer(BigInt::from(2));
    for k in 1..=n {
        let idx = d - k;
        let mut acc = f.coeff(idx);
        for i in (n - k + 1)..=n {
            let j = idx - i;
            if j > n - k && j <= n {
                acc -= &a[i] * &a[j];
            }
        }
        a[n - k] = acc / &two_lead;
    }
    let a = RatPoly::from_coeffs(a);
    let rest = f - &(&a * &a);
    match rest.degree() {
        None => Some((a, Rational::zero())),
        Some(0) => Some((a, rest.constant_term())),
        _ => None,
    }
}

/// Sufficient-rule certification. A supplied witness `(A, c)` must satisfy
/// `f = A^2 + c` exactly; without one, a bounded split search is tried.
pub fn certify_sos4(f: &RatPoly, witness: Option<(&RatPoly, &Rational)>) -> Result<Sos4Certificate> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if let Some((a, c)) = witness {
        check_witness(f, a, c)?;
    }
    let cert = certify_inner(f, witness)?;
    #[cfg(test)]
    cross_check(f, witness).expect("rules disagree");
    Ok(cert)
}

fn split_rule(f: &RatPoly, witness: Option<(&RatPoly, &Rational)>) -> Result<Option<Evidence>> {
    let found;
    let w = match witness {
        Some(w) => Some(w),
        None => {
            found = find_square_plus_constant(f);
            found.as_ref().map(|(a, c)| (a, c))
        }
    };
    match w {
        Some((a, c)) if !c.is_zero() => rule_odd_split_witness(f, a, c),
        _ => Ok(None),
    }
}

fn certify_inner(f: &RatPoly, witness: Option<(&RatPoly, &Rational)>) -> Result<Sos4Certificate> {
    let positivity = is_positive_on_reals(f);
    let (_, g) = f.split_square();
    if !positivity.verdict {
        let g_positive = is_positive_on_reals(&g).verdict;
        if g_positive && positivity.signature != 0 {
            return Err(Error::RealRoots);
        }
        return Ok(Sos4Certificate::new(Verdict::NotSos4, positivity, g, Evidence::None));
    }
    if g.degree() == Some(0) {
        return Ok(Sos4Certificate::new(
            Verdict::Sos4,
            positivity,
            g,
            Evidence::EvenMultiplicities,
        ));
    }
    if let Some(e) = split_rule(f, witness)? {
        return Ok(Sos4Certificate::new(e.verdict(), positivity, g, e));
    }
    let root = z2_root_status(&g, DEFAULT_ROOT_BUDGET);
    let rules: [&dyn Fn() -> Option<Evidence>; 6] = [
        &|| simple_root_evidence(&g, &root),
        &|| rule_eisenstein(&g),
        &|| rule_pure_even_divisor(&g),
        &|| rule_mod2_even_degrees(&g),
        &|| hensel_even_split_with(&g, &root),
        &|| low_degree_with(&g, &root),
    ];
    for rule in rules {
        if let Some(e) = rule() {
            return Ok(Sos4Certificate::new(e.verdict(), positivity, g.clone(), e));
        }
    }
    Ok(Sos4Certificate::new(Verdict::Inconclusive, positivity, g, Evidence::None))
}

/// Runs every rule on `f` and fails if both kinds of evidence appear.
pub fn cross_check(f: &RatPoly, witness: Option<(&RatPoly, &Rational)>) -> Result<Vec<Evidence>> {
    let (_, g) = f.split_square();
    let root = z2_root_status(&g, DEFAULT_ROOT_BUDGET);
    let mut all: Vec<Evidence> = split_rule(f, witness)?.into_iter().collect();
    if g.degree().unwrap_or(0) > 0 {
        all.extend(
            [
                simple_root_evidence(&g, &root),
                rule_eisenstein(&g),
                rule_pure_even_divisor(&g),
                rule_mod2_even_degrees(&g),
                hensel_even_split_with(&g, &root),
                low_degree_with(&g, &root),
            ]
            .into_iter()
            .flatten(),
        );
    }
    let yes = all.iter().any(|e| e.verdict() == Verdict::Sos4);
    let no = all.iter().any(|e| e.verdict() == Verdict::NotSos4);
    if yes && no {
        return Err(Error::Precondition(format!(
            "contradictory evidence for {f}: {:?}",
            all.iter().map(Evidence::rule_name).collect::<Vec<_>>()
        )));
    }
    Ok(all)
}

fn scalar_multiple(a: &RatPoly, b: &RatPoly) -> bool {
    match (a.degree(), b.degree()) {
        (Some(da), Some(db)) if da == db => {
            a.scale(&b.leading_coeff()) == b.scale(&a.leading_coeff())
        }
        _ => false,
    }
}

fn all_even_irreducible(factors: &[(F2Poly, usize)]) -> bool {
    factors.iter().all(|(p, _)| {
        p.degree().is_some_and(|d| d % 2 == 0) && p.factor() == vec![(p.clone(), 1)]
    })
}

fn recheck_evidence(f: &RatPoly, g: &RatPoly, e: &Evidence) -> bool {
    match e {
        Evidence::None => true,
        Evidence::EvenMultiplicities => g.degree() == Some(0),
        Evidence::OddSquareSplit { a, c } => {
            matches!(rule_odd_split_witness(f, a, c), Ok(Some(_)))
        }
        Evidence::SimpleZ2Root { root, .. } => {
            root.has_root()
                && verify_root_status(g, root)
                && discriminant(g).is_ok_and(|d| !d.is_zero())
        }
        Evidence::EisensteinIrreducibleEvenDegree { degree, .. } => {
            g.degree() == Some(*degree) && degree % 2 == 0 && eisenstein_irreducible(g)
        }
        Evidence::PureEvenDivisor { e, .. } => {
            e % 2 == 0 && factor_degree_divisor(&newton_diagram(g)).ok() == Some(*e)
        }
        Evidence::Mod2EvenDegrees { normalized, factors } => {
            let product = factors
                .iter()
                .fold(F2Poly::one(), |acc, (p, m)| acc.mul(&p.pow(*m)));
            scalar_multiple(normalized, g)
                && normalized.leading_coeff().numer().bit(0)
                && reduce_mod2(normalized).is_ok_and(|r| r == product)
                && all_even_irreducible(factors)
        }
        Evidence::HenselEvenSplit {
            normalized,
            even_part,
            odd_part,
            split,
            root,
        } => {
            scalar_multiple(normalized, g)
                && matches!(odd_part.degree(), Some(2) | Some(4))
                && all_even_irreducible(&even_part.factor())
                && odd_part
                    .factor()
                    .iter()
                    .all(|(p, _)| p.degree().is_some_and(|d| d % 2 == 1))
                && split.verify(normalized, even_part, odd_part)
                && root.no_root()
                && verify_root_status(g, root)
        }
        Evidence::NoQ2RootLowDegree { degree, root } => {
            g.degree() == Some(*degree)
                && matches!(degree, 2 | 4)
                && root.no_root()
                && verify_root_status(g, root)
        }
        Evidence::Shifted { shift, inner } => {
            let fs = f.shift(shift);
            let (_, gs) = fs.split_square();
            recheck_evidence(&fs, &gs, inner)
        }
    }
}

/// Re-verifies a certificate for `f` from scratch.
pub fn recheck(f: &RatPoly, cert: &Sos4Certificate) -> bool {
    let positivity = is_positive_on_reals(f);
    let (_, g) = f.split_square();
    if positivity != cert.positivity || g != cert.odd_part {
        return false;
    }
    if cert.evidence.verdict() != cert.verdict && cert.evidence != Evidence::None {
        return false;
    }
    match cert.verdict {
        Verdict::Sos4 => positivity.verdict && recheck_evidence(f, &g, &cert.evidence),
        Verdict::NotSos4 => {
            (cert.evidence == Evidence::None && !positivity.verdict)
                || (cert.evidence != Evidence::None && recheck_evidence(f, &g, &cert.evidence))
        }
        Verdict::Inconclusive => cert.evidence == Evidence::None,
    }
}
