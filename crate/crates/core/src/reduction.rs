//! Reductions to four squares: a polynomial `h` with `f - h^2` certified to
//! be a sum of at most four squares, so that `f` is a sum of five.
//!
//! Every successful result stores the input, `h`, the residual `f - h^2`, and
//! the residual's certificate; [`ReductionResult::verify`] re-checks all of it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::certifier::{
    certify_sos4, find_square_plus_constant, recheck, Sos4Certificate, Verdict,
};
use crate::error::{Error, Result};
use crate::hensel::{
    check_newton_conditions, hensel_split, newton_refine, reduce_mod2, z2_root_status, F2Poly,
    HenselSplit, RootTag, DEFAULT_ROOT_BUDGET,
};
use crate::newton_polygon::{eisenstein_irreducible, newton_diagram};
use crate::padic::{is_square_in_q2, ord2, valuation};
use crate::ratpoly::{
    epsilon_below_infimum, is_positive_on_reals, is_squarefree, parametric_discriminant,
    perturbation_bound, pow2, rational_to_string, RatPoly, Rational,
};

pub const DEFAULT_ALG9_CAP: u32 = 40;

/// Extra values of `l` tried beyond a starting bound before giving up.
const LOOP_BUDGET: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Alg6,
    Alg9,
    AlgN,
    Nos,
    Gr4,
    Picky,
    Zero,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).expect("serializable");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub params: BTreeMap<String, String>,
    pub outcome: String,
}

fn step(params: &[(&str, String)], outcome: impl Into<String>) -> TraceStep {
    TraceStep {
        params: to_map(params),
        outcome: outcome.into(),
    }
}

fn to_map(params: &[(&str, String)]) -> BTreeMap<String, String> {
    params
        .iter()
        .map(|(k, v)| ((*k).to_string(), v.clone()))
        .collect()
}

/// A certified split `q = g * h mod 2^precision` recorded by a reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HenselRecord {
    pub q: RatPoly,
    pub g1: F2Poly,
    pub h1: F2Poly,
    pub split: HenselSplit,
}

impl HenselRecord {
    pub fn verify(&self) -> bool {
        self.split.verify(&self.q, &self.g1, &self.h1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionResult {
    pub input: RatPoly,
    pub h: RatPoly,
    pub method: Method,
    pub parameters: BTreeMap<String, String>,
    pub residual: RatPoly,
    pub residual_certificate: Sos4Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hensel: Option<HenselRecord>,
    pub trace: Vec<TraceStep>,
    pub notes: Vec<String>,
}

impl ReductionResult {
    /// `input - h^2 = residual` exactly, and the residual certificate is an
    /// SOS4 certificate that re-verifies from scratch.
    pub fn verify(&self) -> bool {
        &self.input - &(&self.h * &self.h) == self.residual
            && self.residual_certificate.verdict == Verdict::Sos4
            && recheck(&self.residual, &self.residual_certificate)
            && self.hensel.as_ref().is_none_or(HenselRecord::verify)
    }
}

struct Draft {
    method: Method,
    h: RatPoly,
    parameters: Vec<(&'static str, String)>,
    trace: Vec<TraceStep>,
    hensel: Option<HenselRecord>,
    notes: Vec<String>,
}

impl Draft {
    fn new(method: Method, h: RatPoly) -> Self {
        Draft {
            method,
            h,
            parameters: Vec::new(),
            trace: Vec::new(),
            hensel: None,
            notes: Vec::new(),
        }
    }

    /// Certifies `f - h^2`; fails unless the verdict is SOS4.
    fn finish(self, f: &RatPoly) -> Result<ReductionResult> {
        let residual = f - &(&self.h * &self.h);
        let cert = certify_sos4(&residual, None)?;
        self.finish_with(f, residual, cert)
    }

    fn finish_with(
        self,
        f: &RatPoly,
        residual: RatPoly,
        cert: Sos4Certificate,
    ) -> Result<ReductionResult> {
        if cert.verdict != Verdict::Sos4 {
            return Err(Error::Precondition(format!(
                "residual {residual} is {} under the available rules",
                cert.verdict
            )));
        }
        Ok(ReductionResult {
            input: f.clone(),
            h: self.h,
            method: self.method,
            parameters: to_map(&self.parameters),
            residual,
            residual_certificate: cert,
            hensel: self.hensel,
            trace: self.trace,
            notes: self.notes,
        })
    }
}

fn ord(c: &Rational) -> Option<i64> {
    valuation(c)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    Integer::div_ceil(&a, &b)
}

fn require_positive_squarefree(f: &RatPoly) -> Result<usize> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d == 0 {
        return Err(Error::ConstantPolynomial);
    }
    if !is_squarefree(f) {
        return Err(Error::NotSquarefree);
    }
    if !is_positive_on_reals(f).verdict {
        return Err(Error::NotPositive);
    }
    Ok(d)
}

fn require_integral(f: &RatPoly) -> Result<()> {
    if !f.is_integral() {
        return Err(Error::Precondition("coefficients must be integers".into()));
    }
    Ok(())
}

/// The three lower bounds shared by the gcd-loop algorithms.
struct LowerBounds {
    epsilon: Rational,
    l1: i64,
    l2: i64,
    l3: i64,
}

impl LowerBounds {
    fn of(f: &RatPoly) -> Result<Self> {
        let d = f.degree().expect("checked") as i64;
        let epsilon = epsilon_below_infimum(f)?;
        let j = -ord(&epsilon).expect("positive");
        let l1 = ceil_div(j, 2);
        let k0 = ord(&f.constant_term()).expect("positive constant term");
        let l2 = ceil_div(-k0, 2) + 1;
        let kd = ord(&f.leading_coeff()).expect("nonzero");
        let l3 = (1..d)
            .filter_map(|j| ord(&f.coeff(j as usize)).map(|kj| (j, kj)))
            .map(|(j, kj)| ceil_div(j * kd - d * kj, 2 * d - 2 * j))
            .max()
            .unwrap_or(0);
        Ok(LowerBounds { epsilon, l1, l2, l3 })
    }

    fn start(&self) -> i64 {
        self.l1.max(self.l2).max(self.l3)
    }
}

fn gcd_loop(f: &RatPoly, target: i64, method: Method) -> Result<ReductionResult> {
    let d = f.degree().expect("checked") as i64;
    let kd = ord(&f.leading_coeff()).expect("nonzero");
    let b = LowerBounds::of(f)?;
    let start = b.start();
    let mut l = start;
    let mut trace = Vec::new();
    loop {
        let g = d.gcd(&(2 * l + kd));
        trace.push(step(&[("l", l.to_string())], format!("gcd(d, 2l + k_d) = {g}")));
        if g == target {
            break;
        }
        l += 1;
        if l - start > 2 * d {
            return Err(Error::SearchExhausted(format!(
                "gcd(d, 2l + k_d) never reached {target}"
            )));
        }
    }
    assert!(l >= b.l1 && l >= b.l2 && l >= b.l3, "lower bounds violated");
    let mut draft = Draft::new(method, RatPoly::constant(pow2(-l)));
    draft.parameters = vec![
        ("l", l.to_string()),
        ("l1", b.l1.to_string()),
        ("l2", b.l2.to_string()),
        ("l3", b.l3.to_string()),
        ("epsilon", rational_to_string(&b.epsilon)),
        ("k_d", kd.to_string()),
        ("gcd_increments", (l - start).to_string()),
    ];
    draft.trace = trace;
    draft.finish(f)
}

/// Subtracts `2^(-2l)` for the first admissible `l` with `gcd(d, 2l + k_d) = 1`,
/// making the residual Eisenstein of even degree. Requires odd `k_d`.
pub fn algorithm6(f: &RatPoly) -> Result<ReductionResult> {
    require_positive_squarefree(f)?;
    let kd = ord(&f.leading_coeff()).expect("nonzero");
    if kd % 2 == 0 {
        return Err(Error::Precondition("k_d must be odd".into()));
    }
    gcd_loop(f, 1, Method::Alg6)
}

/// Degree `4 d_0`: loops until `gcd(d, 2l + k_d) = 2`, making the residual
/// pure with factor degrees divisible by `2 d_0`. Odd `k_d` is handed to
/// [`algorithm6`].
pub fn algorithm_n(f: &RatPoly) -> Result<ReductionResult> {
    let d = require_positive_squarefree(f)?;
    if d % 4 != 0 {
        return Err(Error::Precondition("degree must be divisible by 4".into()));
    }
    let kd = ord(&f.leading_coeff()).expect("nonzero");
    if kd % 2 != 0 {
        let mut r = gcd_loop(f, 1, Method::Alg6)?;
        r.notes.push("k_d is odd: delegated to ALG6".into());
        return Ok(r);
    }
    gcd_loop(f, 2, Method::AlgN)
}

/// One of the two candidate residuals of an iteration of [`algorithm9`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchRecord {
    pub branch: String,
    pub polynomial: RatPoly,
    /// The polynomial actually certified: the reversal of `polynomial` in
    /// branch 5b, which has the same factor degrees.
    pub certified_polynomial: RatPoly,
    pub reversed: bool,
    pub eisenstein: bool,
    pub certificate: Sos4Certificate,
}

impl BranchRecord {
    pub fn verify(&self) -> bool {
        let link = if self.reversed {
            self.polynomial.reverse() == self.certified_polynomial
                && self.polynomial.constant_term() != Rational::zero()
        } else {
            self.polynomial == self.certified_polynomial
        };
        link && eisenstein_irreducible(&self.polynomial) == self.eisenstein
            && recheck(&self.certified_polynomial, &self.certificate)
    }

    fn accepted(&self) -> bool {
        self.eisenstein && self.certificate.verdict == Verdict::Sos4
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alg9Iterate {
    pub l: i64,
    pub branch_a: BranchRecord,
    pub branch_b: BranchRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonTermination {
    pub input: RatPoly,
    pub cap: u32,
    pub iterates_tested: Vec<Alg9Iterate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Alg9Outcome {
    Reduced(Box<ReductionResult>),
    NonTermination(NonTermination),
}

fn shifted_witness(w: Option<(&RatPoly, &Rational)>, by: &Rational) -> Option<(RatPoly, Rational)> {
    w.map(|(a, c)| (a.clone(), c - by))
}

fn as_ref_pair(w: &Option<(RatPoly, Rational)>) -> Option<(&RatPoly, &Rational)> {
    w.as_ref().map(|(a, c)| (a, c))
}

/// The loop that subtracts `2^(-2l)` or `2^(-2l) x^d` for increasing `l`,
/// accepting a branch whose residual is Eisenstein-irreducible and certified.
/// Irreducibility is only detected through sufficient tests, so the loop is
/// cut off after `cap` iterations.
///
/// `witness` is an optional split `f = A^2 + c`; it is reused for the
/// reversed polynomial when `f` is palindromic.
pub fn algorithm9(
    f: &RatPoly,
    cap: u32,
    witness: Option<(&RatPoly, &Rational)>,
) -> Result<Alg9Outcome> {
    let d = require_positive_squarefree(f)?;
    if d % 2 != 0 {
        return Err(Error::Precondition("degree must be even".into()));
    }
    let initial = certify_sos4(f, witness)?;
    if initial.verdict == Verdict::Sos4 {
        let mut draft = Draft::new(Method::Zero, RatPoly::zero());
        draft.trace.push(step(&[], "input certified SOS4"));
        return Ok(Alg9Outcome::Reduced(Box::new(draft.finish_with(
            f,
            f.clone(),
            initial,
        )?)));
    }
    let fstar = f.reverse();
    let star_witness = if fstar == *f {
        witness.map(|(a, c)| (a.clone(), c.clone()))
    } else {
        find_square_plus_constant(&fstar)
    };
    let eps = epsilon_below_infimum(f)?.min(epsilon_below_infimum(&fstar)?);
    let mut l = ceil_div(-ord(&eps).expect("positive"), 2);
    let xd = RatPoly::monomial(Rational::one(), d);
    let mut iterates = Vec::new();
    let mut trace = Vec::new();
    for _ in 0..cap {
        let t = pow2(-2 * l);
        let pa = f - &RatPoly::constant(t.clone());
        let wa = shifted_witness(witness, &t);
        let branch_a = BranchRecord {
            branch: "5a".into(),
            certificate: certify_sos4(&pa, as_ref_pair(&wa))?,
            eisenstein: eisenstein_irreducible(&pa),
            certified_polynomial: pa.clone(),
            reversed: false,
            polynomial: pa,
        };
        let pb = f - &xd.scale(&t);
        let reversed = pb.degree() == Some(d);
        let (certified, wb) = if reversed {
            (&fstar - &RatPoly::constant(t.clone()), shifted_witness(as_ref_pair(&star_witness), &t))
        } else {
            (pb.clone(), None)
        };
        let branch_b = BranchRecord {
            branch: "5b".into(),
            certificate: certify_sos4(&certified, as_ref_pair(&wb))?,
            eisenstein: eisenstein_irreducible(&pb),
            certified_polynomial: certified,
            reversed,
            polynomial: pb,
        };
        trace.push(step(
            &[("l", l.to_string())],
            format!(
                "5a: {} ({}), 5b: {} ({})",
                branch_a.certificate.verdict,
                branch_a.certificate.rule,
                branch_b.certificate.verdict,
                branch_b.certificate.rule
            ),
        ));
        let accepted = if branch_a.accepted() {
            Some((RatPoly::constant(pow2(-l)), branch_a.polynomial.clone(), branch_a.certificate.clone(), "5a"))
        } else if branch_b.accepted() {
            let cert = certify_sos4(&branch_b.polynomial, None)?;
            Some((RatPoly::monomial(pow2(-l), d / 2), branch_b.polynomial.clone(), cert, "5b"))
        } else {
            None
        };
        if let Some((h, residual, cert, branch)) = accepted {
            let mut draft = Draft::new(Method::Alg9, h);
            draft.parameters = vec![
                ("l", l.to_string()),
                ("branch", branch.to_string()),
                ("epsilon", rational_to_string(&eps)),
            ];
            draft.trace = trace;
            return Ok(Alg9Outcome::Reduced(Box::new(draft.finish_with(f, residual, cert)?)));
        }
        iterates.push(Alg9Iterate {
            l,
            branch_a,
            branch_b,
        });
        l += 1;
    }
    Ok(Alg9Outcome::NonTermination(NonTermination {
        input: f.clone(),
        cap,
        iterates_tested: iterates,
    }))
}

/// Search ranges for [`nos_reduce_with`].
#[derive(Clone, Copy, Debug)]
pub struct NosBudget {
    pub max_n: u64,
    pub max_ell: u32,
}

impl Default for NosBudget {
    fn default() -> Self {
        NosBudget {
            max_n: 99,
            max_ell: 64,
        }
    }
}

/// `Some(a)` when `c = 2^(2a) (4k + 3)` for integers `a`, `k >= 0`.
pub fn nos_exponent(c: &Rational) -> Option<i64> {
    if !c.is_positive() || !c.is_integer() {
        return None;
    }
    let (v, u) = ord2(c).ok()?;
    let r = u.numer().mod_floor(&BigInt::from(4));
    (v % 2 == 0 && r == BigInt::from(3)).then_some(v / 2)
}

pub fn nos_reduce(f: &RatPoly) -> Result<ReductionResult> {
    nos_reduce_with(f, NosBudget::default())
}

/// For `f(0) = 2^(2a)(4k + 3)`: subtracts `(x^(d/2) / 2^l + 2^a / N)^2` for the
/// first `(N, l)` (odd `N` outer, `l` inner) whose residual is positive with
/// diagram vertices exactly `(0, 2a + 1)` and `(d, -2l)` and no interior
/// lattice point on the segment.
pub fn nos_reduce_with(f: &RatPoly, budget: NosBudget) -> Result<ReductionResult> {
    require_integral(f)?;
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d == 0 || d % 2 != 0 {
        return Err(Error::Precondition("degree must be even and positive".into()));
    }
    if !is_positive_on_reals(f).verdict {
        return Err(Error::NotPositive);
    }
    let a = nos_exponent(&f.constant_term()).ok_or_else(|| {
        Error::Precondition("constant term not of form 2^{2a}(4k+3)".into())
    })?;
    let mut trace = Vec::new();
    let mut last = (0u64, 0u32);
    for n in (3..=budget.max_n).step_by(2) {
        for ell in 1..=budget.max_ell {
            last = (n, ell);
            let params = [("N", n.to_string()), ("l", ell.to_string())];
            let ell_i = i64::from(ell);
            let h = &RatPoly::monomial(pow2(-ell_i), d / 2)
                + &RatPoly::constant(pow2(a) / Rational::from_integer(n.into()));
            let g = f - &(&h * &h);
            let diagram = newton_diagram(&g);
            let expected = vec![(0usize, 2 * a + 1), (d, -2 * ell_i)];
            if diagram.vertices != expected {
                trace.push(step(&params, "diagram vertices differ"));
                continue;
            }
            if (2 * a + 1 + 2 * ell_i).gcd(&(d as i64)) != 1 {
                trace.push(step(&params, "segment has interior lattice points"));
                continue;
            }
            if !is_positive_on_reals(&g).verdict {
                trace.push(step(&params, "residual not positive"));
                continue;
            }
            let cert = certify_sos4(&g, None)?;
            if cert.verdict != Verdict::Sos4 {
                trace.push(step(&params, format!("residual {}", cert.verdict)));
                continue;
            }
            assert_eq!(ord(&g.constant_term()), Some(2 * a + 1));
            trace.push(step(&params, "accepted"));
            let mut draft = Draft::new(Method::Nos, h);
            draft.parameters = vec![
                ("N", n.to_string()),
                ("l", ell.to_string()),
                ("a", a.to_string()),
            ];
            draft.trace = trace;
            return draft.finish_with(f, g, cert);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no (N, l) accepted; last tried (N, l) = ({}, {})",
        last.0, last.1
    )))
}

fn x2_x_1() -> RatPoly {
    RatPoly::from_ints(&[1, 1, 1])
}

/// Degree `4k`: subtracts `(x^2 + x + 1)^(2k) / 2^(2l)` for the first `l` with
/// positive residual, so that the residual's mod-2 image is
/// `(x^2 + x + 1)^(2k)`.
pub fn gr4_reduce(f: &RatPoly) -> Result<ReductionResult> {
    require_integral(f)?;
    let d = require_positive_squarefree(f)?;
    if d % 4 != 0 {
        return Err(Error::Precondition("degree must be divisible by 4".into()));
    }
    let k = (d / 4) as u32;
    let q0 = x2_x_1().pow(2 * k);
    let eps0 = perturbation_bound(f, &-&q0)?;
    let mut ell0 = 1i64;
    while pow2(-2 * ell0) > eps0 {
        ell0 += 1;
    }
    let target = reduce_mod2(&q0)?;
    let mut trace = Vec::new();
    for ell in ell0..ell0 + LOOP_BUDGET {
        let params = [("l", ell.to_string())];
        let h = x2_x_1().pow(k).scale(&pow2(-ell));
        let residual = f - &(&h * &h);
        if !is_positive_on_reals(&residual).verdict {
            trace.push(step(&params, "residual not positive"));
            continue;
        }
        let scaled = residual.scale(&pow2(2 * ell));
        assert_eq!(reduce_mod2(&scaled)?, target, "mod-2 image of the residual");
        let cert = certify_sos4(&residual, None)?;
        if cert.verdict != Verdict::Sos4 {
            trace.push(step(&params, format!("residual {}", cert.verdict)));
            continue;
        }
        trace.push(step(&params, "accepted"));
        let mut draft = Draft::new(Method::Gr4, h);
        draft.parameters = vec![
            ("l", ell.to_string()),
            ("l0", ell0.to_string()),
            ("k", k.to_string()),
            ("epsilon0", rational_to_string(&eps0)),
        ];
        draft.trace = trace;
        return draft.finish_with(f, residual, cert);
    }
    Err(Error::SearchExhausted("no admissible l for gr4".into()))
}

/// A certified reason why the degree-`2(2k+1)` subtraction cannot work: for
/// `f(0)` a 2-adic square, `2^(2l) f - (x^2+x+1)^(2k) x^2` has a simple root
/// in `Z_2` near `2^(l+a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PickyObstruction {
    pub input: RatPoly,
    pub l: i64,
    pub a: i64,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub gamma: BigInt,
    pub delta: u32,
    pub q: RatPoly,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub refined_root: BigInt,
    pub refined_precision: u32,
    /// `ord_2 q(refined_root)`, absent when the value is exactly zero.
    pub refined_valuation: Option<i64>,
    pub parametric_discriminant: RatPoly,
    pub residual: RatPoly,
    pub residual_certificate: Sos4Certificate,
    pub trace: Vec<TraceStep>,
}

impl PickyObstruction {
    pub fn verify(&self) -> bool {
        let two_l = pow2(2 * self.l);
        let w = picky_subtrahend(self.input.degree().unwrap_or(0));
        self.q == &self.input.scale(&two_l) - &w
            && self.residual == self.q.scale(&pow2(-2 * self.l))
            && check_newton_conditions(&self.q, &self.gamma, self.delta).is_ok()
            && self
                .refined_valuation
                .is_none_or(|v| v >= 2 * i64::from(self.delta) + 1)
            && !self.parametric_discriminant.evaluate(&two_l).is_zero()
            && self.residual_certificate.verdict == Verdict::NotSos4
            && recheck(&self.residual, &self.residual_certificate)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PickyOutcome {
    Reduced(Box<ReductionResult>),
    Obstruction(Box<PickyObstruction>),
    Inconclusive { reason: String, trace: Vec<TraceStep> },
}

/// `(x^2 + x + 1)^(2k) x^2` for degree `d = 2(2k + 1)`.
fn picky_subtrahend(d: usize) -> RatPoly {
    let k = (d.saturating_sub(2) / 4) as u32;
    &x2_x_1().pow(2 * k) * &RatPoly::monomial(Rational::one(), 2)
}

fn picky_h(d: usize, ell: i64) -> RatPoly {
    let k = ((d - 2) / 4) as u32;
    (&x2_x_1().pow(k) * &RatPoly::x()).scale(&pow2(-ell))
}

/// Degree `2(2k + 1)`: subtracts `((x^2+x+1)^k x / 2^l)^2`.
///
/// When `f(0)` is not a 2-adic square the residual is certified for large
/// `l`; when it is, the residual has a certified simple root in `Q_2` and an
/// obstruction report is returned.
pub fn picky_reduce(f: &RatPoly) -> Result<PickyOutcome> {
    require_integral(f)?;
    let d = require_positive_squarefree(f)?;
    if d % 4 != 2 {
        return Err(Error::Precondition("degree must be 2 mod 4".into()));
    }
    let c0 = f.constant_term();
    let (k0, _) = ord2(&c0)?;
    if is_square_in_q2(&c0) {
        picky_obstruction(f, d, k0 / 2)
    } else if d == 2 {
        picky_quadratic(f, k0)
    } else {
        picky_hensel(f, d, k0)
    }
}

fn picky_obstruction(f: &RatPoly, d: usize, a: i64) -> Result<PickyOutcome> {
    let w = picky_subtrahend(d);
    let p = parametric_discriminant(f, &-&w)?;
    let mut trace = Vec::new();
    for ell in (a + 3)..(a + 3 + LOOP_BUDGET) {
        let params = [("l", ell.to_string())];
        let two_l = pow2(2 * ell);
        let residual = f - &w.scale(&pow2(-2 * ell));
        if !is_positive_on_reals(&residual).verdict {
            trace.push(step(&params, "residual not positive"));
            continue;
        }
        if p.evaluate(&two_l).is_zero() {
            trace.push(step(&params, "parametric discriminant vanishes"));
            continue;
        }
        let q = &f.scale(&two_l) - &w;
        let gamma = BigInt::one() << (ell + a) as usize;
        let delta = (ell + a + 1) as u32;
        if let Err(e) = check_newton_conditions(&q, &gamma, delta) {
            trace.push(step(&params, e.to_string()));
            continue;
        }
        let precision = 64u32.max(2 * delta + 2);
        let root = newton_refine(&q, &gamma, delta, precision)?;
        let refined_valuation = ord(&q.evaluate(&Rational::from_integer(root.clone())));
        assert!(refined_valuation.is_none_or(|v| v >= 2 * i64::from(delta) + 1));
        let cert = certify_sos4(&residual, None)?;
        trace.push(step(&params, format!("Newton witness verified; residual {}", cert.verdict)));
        return Ok(PickyOutcome::Obstruction(Box::new(PickyObstruction {
            input: f.clone(),
            l: ell,
            a,
            gamma,
            delta,
            q,
            refined_root: root,
            refined_precision: precision,
            refined_valuation,
            parametric_discriminant: p,
            residual,
            residual_certificate: cert,
            trace,
        })));
    }
    Ok(PickyOutcome::Inconclusive {
        reason: "no l verified the Newton witness within budget".into(),
        trace,
    })
}

fn floor_plus_one(bound: Ratio<i64>) -> i64 {
    bound.floor().to_integer() + 1
}

fn picky_quadratic(f: &RatPoly, k0: i64) -> Result<PickyOutcome> {
    let start = floor_plus_one(Ratio::from(2).max(Ratio::new(k0 + 5, 2)));
    let mut trace = Vec::new();
    for ell in start..start + LOOP_BUDGET {
        let params = [("l", ell.to_string())];
        let h = picky_h(2, ell);
        let residual = f - &(&h * &h);
        if !is_positive_on_reals(&residual).verdict {
            trace.push(step(&params, "residual not positive"));
            continue;
        }
        let q = residual.scale(&pow2(2 * ell));
        let (c, b, a2) = (q.coeff(0), q.coeff(1), q.coeff(2));
        let disc = &b * &b - Rational::from_integer(4.into()) * &a2 * &c;
        if is_square_in_q2(&disc) {
            trace.push(step(&params, "discriminant is a 2-adic square"));
            continue;
        }
        let cert = certify_sos4(&residual, None)?;
        if cert.verdict != Verdict::Sos4 {
            trace.push(step(&params, format!("residual {}", cert.verdict)));
            continue;
        }
        trace.push(step(&params, "accepted"));
        let mut draft = Draft::new(Method::Picky, h);
        draft.parameters = vec![
            ("l", ell.to_string()),
            ("k", "0".into()),
            ("q", q.to_string()),
            ("discriminant", rational_to_string(&disc)),
        ];
        draft.trace = trace;
        return Ok(PickyOutcome::Reduced(Box::new(draft.finish_with(f, residual, cert)?)));
    }
    Ok(PickyOutcome::Inconclusive {
        reason: "no l within budget gave a non-square discriminant".into(),
        trace,
    })
}

fn picky_hensel(f: &RatPoly, d: usize, k0: i64) -> Result<PickyOutcome> {
    let k = ((d - 2) / 4) as u32;
    let mut bound = Ratio::from(1);
    if let Some(k1) = ord(&f.coeff(1)) {
        bound = bound.max(Ratio::new(k0, 2) - k1 + 2);
    }
    let start = floor_plus_one(bound);
    let w = picky_subtrahend(d);
    let g1 = reduce_mod2(&x2_x_1().pow(2 * k))?;
    let h1 = F2Poly::from_bits(0b100);
    let mut trace = Vec::new();
    for ell in start..start + LOOP_BUDGET {
        let params = [("l", ell.to_string())];
        let residual = f - &w.scale(&pow2(-2 * ell));
        if !is_positive_on_reals(&residual).verdict {
            trace.push(step(&params, "residual not positive"));
            continue;
        }
        let q = &f.scale(&pow2(2 * ell)) - &w;
        let split = hensel_split(&q, &g1, &h1, 64)?;
        let record = HenselRecord {
            q: q.clone(),
            g1: g1.clone(),
            h1: h1.clone(),
            split,
        };
        assert!(record.verify(), "Hensel split re-verification");
        let root = z2_root_status(&q, DEFAULT_ROOT_BUDGET);
        if root.tag != RootTag::NoRoot {
            trace.push(step(&params, format!("root status {:?}", root.tag)));
            continue;
        }
        let cert = certify_sos4(&residual, None)?;
        if cert.verdict != Verdict::Sos4 {
            trace.push(step(&params, format!("residual {}", cert.verdict)));
            continue;
        }
        trace.push(step(&params, "accepted"));
        let mut draft = Draft::new(Method::Picky, picky_h(d, ell));
        draft.parameters = vec![
            ("l", ell.to_string()),
            ("k", k.to_string()),
            ("root_sieve_depth", root.sieve_depth.to_string()),
        ];
        draft.trace = trace;
        draft.hensel = Some(record);
        return Ok(PickyOutcome::Reduced(Box::new(draft.finish_with(f, residual, cert)?)));
    }
    Ok(PickyOutcome::Inconclusive {
        reason: "no l within budget certified the residual".into(),
        trace,
    })
}

/// `f_{k,N} = (4/N^2) x^(2(2k+1)) + (1/N^2) x^(2k+1) + 4/N^2` with its split
/// `f = A^2 + c`, `A = (2/N) x^(2k+1) + 1/(4N)`, `c = 63/(16 N^2)`.
pub fn make_fkn(k: u32, n: u64) -> Result<(RatPoly, RatPoly, Rational)> {
    if n % 2 == 0 || n <= 64 {
        return Err(Error::Precondition("N must be odd and greater than 64".into()));
    }
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let r = |num: i64, den: &BigInt| Rational::new(BigInt::from(num), den.clone());
    let m = (2 * k + 1) as usize;
    let f = &(&RatPoly::monomial(r(4, &n2), 2 * m) + &RatPoly::monomial(r(1, &n2), m))
        + &RatPoly::constant(r(4, &n2));
    let a = &RatPoly::monomial(r(2, &n), m) + &RatPoly::constant(r(1, &(&n * 4)));
    let c = r(63, &(&n2 * 16));
    if &(&a * &a) + &RatPoly::constant(c.clone()) != f {
        return Err(Error::WitnessMismatch("f_{k,N} split".into()));
    }
    Ok((f, a, c))
}

/// `g^2 + 8a - 1` with the split witness `(g, 8a - 1)`.
pub fn make_dos(g: &RatPoly, a: u64) -> Result<(RatPoly, RatPoly, Rational)> {
    require_integral(g)?;
    if g.degree().is_none_or(|d| d % 2 == 0) {
        return Err(Error::Precondition("g must have odd degree".into()));
    }
    if a == 0 {
        return Err(Error::Precondition("a must be positive".into()));
    }
    let c = Rational::from_integer(BigInt::from(8 * a - 1));
    let f = &(g * g) + &RatPoly::constant(c.clone());
    Ok((f, g.clone(), c))
}

/// Shifts tried by [`reduce_dispatch`]: integers in `[-4, 4]` by absolute
/// value (negative first), then halves in `[-2, 2]`.
pub fn default_shifts() -> Vec<Rational> {
    let mut out = Vec::new();
    for n in 1..=4i64 {
        out.push(Rational::from_integer((-n).into()));
        out.push(Rational::from_integer(n.into()));
    }
    for n in [1i64, 3] {
        out.push(Rational::new((-n).into(), 2.into()));
        out.push(Rational::new(n.into(), 2.into()));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InconclusiveReport {
    pub input: RatPoly,
    pub attempts: Vec<TraceStep>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DispatchOutcome {
    Reduced(Box<ReductionResult>),
    Inconclusive(InconclusiveReport),
}

/// `(r, r^2 f)` with `r` a positive integer making every coefficient integral.
fn square_normalize(f: &RatPoly) -> (BigInt, RatPoly) {
    let den = f.denominator_lcm();
    let root = den.sqrt();
    let r = if &root * &root == den { root } else { den };
    let scaled = f.scale(&Rational::from_integer(&r * &r));
    (r, scaled)
}

/// A candidate input for the methods: `G(x) = r^2 g(x + shift)`.
struct Frame {
    shift: Rational,
    r: BigInt,
    poly: RatPoly,
}

impl Frame {
    fn new(g: &RatPoly, shift: Rational) -> Self {
        let (r, poly) = square_normalize(&g.shift(&shift));
        Frame { shift, r, poly }
    }

    fn label(&self) -> (&'static str, String) {
        ("shift", rational_to_string(&self.shift))
    }
}

/// Transfers a reduction of `G = r^2 g(x + shift)` to `f = s^2 g`:
/// `h_f(x) = s(x) h_G(x - shift) / r`.
fn transfer(f: &RatPoly, s: &RatPoly, frame: &Frame, res: ReductionResult) -> Result<ReductionResult> {
    let back = res
        .h
        .shift(&-&frame.shift)
        .scale(&Rational::new(BigInt::one(), frame.r.clone()));
    let h = s * &back;
    let residual = f - &(&h * &h);
    let mut cert = certify_sos4(&residual, None)?;
    if cert.verdict != Verdict::Sos4 && !frame.shift.is_zero() {
        let inner = certify_sos4(&residual.shift(&frame.shift), None)?;
        if inner.verdict == Verdict::Sos4 {
            cert = inner.shifted(&residual, frame.shift.clone());
        }
    }
    let mut draft = Draft::new(res.method, h);
    draft.trace = res.trace;
    draft.notes = res.notes;
    if s.degree() != Some(0) {
        draft.notes.push(format!("square factor s = {s} removed; h multiplied by s"));
    }
    draft.hensel = res.hensel;
    let mut out = draft.finish_with(f, residual, cert)?;
    out.parameters = res.parameters;
    out.parameters.insert("shift".into(), rational_to_string(&frame.shift));
    out.parameters.insert("scale".into(), frame.r.to_string());
    Ok(out)
}

type Runner<'a> = &'a dyn Fn(&RatPoly) -> Result<Option<ReductionResult>>;

struct Attempts<'a> {
    f: &'a RatPoly,
    s: &'a RatPoly,
    log: Vec<TraceStep>,
}

impl Attempts<'_> {
    fn run(&mut self, name: &str, frame: &Frame, run: Runner<'_>) -> Option<ReductionResult> {
        let params = [("method", name.to_string()), frame.label()];
        let out = run(&frame.poly).and_then(|r| r.map(|r| transfer(self.f, self.s, frame, r)).transpose());
        let (outcome, r) = match out {
            Ok(Some(r)) => ("accepted".to_string(), Some(r)),
            Ok(None) => ("not applicable".to_string(), None),
            Err(e) => (e.to_string(), None),
        };
        self.log.push(step(&params, outcome));
        r
    }

    fn skip(&mut self, name: &str, frame: &Frame, why: &str) {
        self.log.push(step(&[("method", name.to_string()), frame.label()], why));
    }

    fn finish(self, mut r: ReductionResult) -> Result<DispatchOutcome> {
        let mut trace = self.log;
        trace.append(&mut r.trace);
        r.trace = trace;
        Ok(DispatchOutcome::Reduced(Box::new(r)))
    }
}

/// Tries the reductions in a fixed order and returns the first certified one.
pub fn reduce_dispatch(f: &RatPoly) -> Result<DispatchOutcome> {
    reduce_dispatch_with(f, &default_shifts())
}

pub fn reduce_dispatch_with(f: &RatPoly, shifts: &[Rational]) -> Result<DispatchOutcome> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !is_positive_on_reals(f).verdict {
        let (_, g) = f.split_square();
        return Err(if is_positive_on_reals(&g).verdict {
            Error::RealRoots
        } else {
            Error::NotPositive
        });
    }
    let cert = certify_sos4(f, None)?;
    if cert.verdict == Verdict::Sos4 {
        let mut draft = Draft::new(Method::Zero, RatPoly::zero());
        draft.trace.push(step(&[], "input certified SOS4"));
        return Ok(DispatchOutcome::Reduced(Box::new(draft.finish_with(f, f.clone(), cert)?)));
    }
    let (s, g) = f.split_square();
    let d = g.degree().expect("nonconstant odd part");
    let base = Frame::new(&g, Rational::zero());
    let frames: Vec<Frame> = shifts.iter().map(|a| Frame::new(&g, a.clone())).collect();
    let mut attempts = Attempts {
        f,
        s: &s,
        log: Vec::new(),
    };

    let kd = ord(&base.poly.leading_coeff()).expect("nonzero");
    if kd % 2 != 0 {
        if let Some(r) = attempts.run("ALG6", &base, &|p| algorithm6(p).map(Some)) {
            return attempts.finish(r);
        }
    }
    if d % 4 == 0 {
        if let Some(r) = attempts.run("ALGN", &base, &|p| algorithm_n(p).map(Some)) {
            return attempts.finish(r);
        }
    }
    for frame in std::iter::once(&base).chain(&frames) {
        if nos_exponent(&frame.poly.constant_term()).is_none() {
            attempts.skip("NOS", frame, "constant term not of form 2^{2a}(4k+3)");
            continue;
        }
        if let Some(r) = attempts.run("NOS", frame, &|p| nos_reduce(p).map(Some)) {
            return attempts.finish(r);
        }
    }
    if d % 4 == 0 {
        if let Some(r) = attempts.run("GR4", &base, &|p| gr4_reduce(p).map(Some)) {
            return attempts.finish(r);
        }
    }
    let mut all_squares = true;
    for frame in std::iter::once(&base).chain(&frames) {
        if is_square_in_q2(&frame.poly.constant_term()) {
            attempts.skip("PICKY", frame, "constant term is a 2-adic square");
            continue;
        }
        all_squares = false;
        if d % 4 == 2 {
            let run = |p: &RatPoly| match picky_reduce(p)? {
                PickyOutcome::Reduced(r) => Ok(Some(*r)),
                _ => Ok(None),
            };
            if let Some(r) = attempts.run("PICKY", frame, &run) {
                return attempts.finish(r);
            }
        }
    }
    let note = all_squares.then(|| {
        "f(alpha) is a square in Q_2 at every tested shift alpha, so no shift \
         produces a constant term that is not a 2-adic square (compare 4x^6 + 4x^3 + 9, \
         which takes 2-adic square values at every rational point)"
            .to_string()
    });
    Ok(DispatchOutcome::Inconclusive(InconclusiveReport {
        input: f.clone(),
        attempts: attempts.log,
        note,
    }))
}
