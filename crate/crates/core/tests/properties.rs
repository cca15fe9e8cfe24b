//! Property tests for the invariants each module promises.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use padic_sos::certifier::{certify_sos4, cross_check, recheck, Verdict};
use padic_sos::hensel::{f2_factor, hensel_split, reduce_mod2, F2Poly};
use padic_sos::newton_polygon::newton_diagram;
use padic_sos::padic::{is_square_in_q2, padic_sqrt, residue_mod_pow2, valuation, PadicValue};
use padic_sos::ratpoly::{
    count_distinct_and_real_roots, is_positive_on_reals, is_squarefree, sturm_real_root_count,
};
use padic_sos::reduction::{make_dos, reduce_dispatch, DispatchOutcome};
use padic_sos::text::parse_poly;
use padic_sos::{RatPoly, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..=1000, 1i64..=1000).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |q| !q.is_zero())
}

fn int_poly(max_deg: usize, bound: i64) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec(-bound..=bound, 1..=max_deg + 1)
        .prop_map(|c| RatPoly::from_ints(&c))
        .prop_filter("nonzero", |f| !f.is_zero())
}

fn rat_poly(max_deg: usize) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec(rational(), 1..=max_deg + 1).prop_map(RatPoly::from_coeffs)
}

/// `a^2 + b^2 + k` with integer `a`, `b` and `k > 0`: positive on the line.
fn positive_poly(max_half_deg: usize) -> impl Strategy<Value = RatPoly> {
    (int_poly(max_half_deg, 4), int_poly(max_half_deg, 4), 1i64..=9)
        .prop_map(|(a, b, k)| &(&(&a * &a) + &(&b * &b)) + &RatPoly::from_ints(&[k]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_commutes_with_shift(f in rat_poly(6), a in rational(), t in rational()) {
        prop_assert_eq!(f.shift(&a).evaluate(&t), f.evaluate(&(&t + &a)));
    }

    #[test]
    fn product_evaluates_pointwise(f in rat_poly(5), g in rat_poly(5), t in rational()) {
        prop_assert_eq!((&f * &g).evaluate(&t), f.evaluate(&t) * g.evaluate(&t));
    }

    #[test]
    fn division_identity(f in rat_poly(7), g in int_poly(4, 9)) {
        let (quo, rem) = f.div_rem(&g).unwrap();
        prop_assert_eq!(&(&quo * &g) + &rem, f);
        prop_assert!(rem.degree() < g.degree() || rem.is_zero());
    }

    #[test]
    fn hankel_agrees_with_sturm(f in int_poly(8, 12)) {
        prop_assume!(f.degree().unwrap_or(0) >= 1);
        let (rank, sig) = count_distinct_and_real_roots(&f).unwrap();
        let sturm = sturm_real_root_count(&f).unwrap();
        prop_assert_eq!(sig, sturm as i64);
        let distinct = f.squarefree_part().degree().unwrap();
        prop_assert_eq!(rank, distinct);
    }

    #[test]
    fn sum_of_squares_plus_constant_is_positive(f in positive_poly(4)) {
        prop_assert!(is_positive_on_reals(&f).verdict);
        prop_assert!(!is_positive_on_reals(&(-&f)).verdict);
    }

    #[test]
    fn square_test_matches_residues(n in -100_000i64..=100_000, d in 1i64..=100) {
        // |n d| < 2^24, so being a square mod 2^27 decides squareness in Z_2.
        let q = Rational::new(n.into(), d.into());
        let m = n * d;
        let modulus = 1i64 << 27;
        let r = m.rem_euclid(modulus);
        let v = if r == 0 { 27 } else { r.trailing_zeros() };
        let brute = r == 0 || (v % 2 == 0 && (r >> v) % 8 == 1);
        prop_assert_eq!(is_square_in_q2(&q), brute);
    }

    #[test]
    fn square_class_is_invariant_under_squares(q in nonzero_rational(), r in nonzero_rational()) {
        prop_assert_eq!(is_square_in_q2(&q), is_square_in_q2(&(&q * &r * &r)));
        prop_assert!(is_square_in_q2(&(&r * &r)));
    }

    #[test]
    fn sqrt_squares_back(q in nonzero_rational(), m in 3u32..40) {
        let s = q.clone() * q.clone();
        let root = padic_sqrt(&s, m).unwrap();
        let PadicValue::Nonzero { valuation: half, unit_residue } = root.value else {
            panic!("zero root of a nonzero square");
        };
        let v = valuation(&s).unwrap();
        prop_assert_eq!(2 * half, v);
        let unit = s / padic_sos::ratpoly::pow2(v);
        let r = BigInt::from(unit_residue);
        let modulus = BigInt::one() << m as usize;
        prop_assert_eq!((&r * &r).mod_floor(&modulus), residue_mod_pow2(&unit, m).unwrap());
    }

    #[test]
    fn newton_diagram_is_lower_convex(f in rat_poly(9)) {
        prop_assume!(!f.is_zero());
        let d = newton_diagram(&f);
        for w in d.segments.windows(2) {
            prop_assert!(w[0].slope < w[1].slope);
        }
        for (i, c) in f.coeffs().iter().enumerate() {
            if let Some(v) = valuation(c) {
                prop_assert!(d.lies_on_or_above(i, v));
            }
        }
        for s in &d.segments {
            prop_assert_eq!(
                s.lattice_length,
                num_integer::gcd(s.run(), s.rise().abs()) as u64
            );
        }
    }

    #[test]
    fn f2_factorization_multiplies_back(bits in 1u64..(1 << 16)) {
        let f = F2Poly::from_bits(bits);
        let prod = f2_factor(&f)
            .iter()
            .fold(F2Poly::one(), |acc, (p, e)| acc.mul(&p.pow(*e)));
        prop_assert_eq!(prod, f);
    }

    #[test]
    fn hensel_lift_verifies(f in int_poly(8, 20), m in 1u32..80) {
        let f = &f + &RatPoly::monomial(Rational::one(), 9);
        let f1 = reduce_mod2(&f).unwrap();
        let factors = f2_factor(&f1);
        prop_assume!(factors.len() >= 2);
        let (p, e) = &factors[0];
        let g1 = p.pow(*e);
        let h1 = f1.div_rem(&g1).0;
        let split = hensel_split(&f, &g1, &h1, m).unwrap();
        prop_assert!(split.verify(&f, &g1, &h1));
    }

    #[test]
    fn polynomials_round_trip_through_text(f in rat_poly(8)) {
        prop_assert_eq!(parse_poly(&f.to_string()).unwrap(), f.clone());
        let json = padic_sos::json::to_string_pretty(&f);
        prop_assert_eq!(parse_poly(&json).unwrap(), f);
    }
}

fn decisive(v: Verdict) -> bool {
    v != Verdict::Inconclusive
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certificates_recheck_and_rules_agree(f in positive_poly(3)) {
        let cert = certify_sos4(&f, None).unwrap();
        prop_assert!(recheck(&f, &cert));
        let verdicts: Vec<Verdict> = cross_check(&f, None).unwrap().iter().map(|e| e.verdict()).collect();
        prop_assert!(!(verdicts.contains(&Verdict::Sos4) && verdicts.contains(&Verdict::NotSos4)));
    }

    #[test]
    fn verdict_is_invariant_under_square_scaling(f in positive_poly(3), r in nonzero_rational()) {
        let a = certify_sos4(&f, None).unwrap().verdict;
        let b = certify_sos4(&f.scale(&(&r * &r)), None).unwrap().verdict;
        if decisive(a) && decisive(b) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn verdict_is_invariant_under_integer_shift(f in positive_poly(3), n in -3i64..=3) {
        let a = certify_sos4(&f, None).unwrap().verdict;
        let b = certify_sos4(&f.shift(&Rational::from_integer(n.into())), None).unwrap().verdict;
        if decisive(a) && decisive(b) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn odd_square_split_family_is_shift_invariant(
        g in int_poly(3, 3).prop_filter("odd degree", |g| g.degree().is_some_and(|d| d % 2 == 1)),
        a in 1u64..=4,
        n in -2i64..=2,
    ) {
        let (f, wa, wc) = make_dos(&g, a).unwrap();
        let s = Rational::from_integer(n.into());
        let fs = f.shift(&s);
        let was = wa.shift(&s);
        let cert = certify_sos4(&fs, Some((&was, &wc))).unwrap();
        prop_assert_eq!(cert.verdict, Verdict::NotSos4);
        prop_assert!(recheck(&fs, &cert));
    }

    #[test]
    fn square_valued_sextic_defeats_dispatch(n in -10_000i64..=10_000, d in 1i64..=10_000) {
        let f = RatPoly::from_ints(&[9, 0, 0, 4, 0, 0, 4]);
        let q = Rational::new(n.into(), d.into());
        prop_assert!(is_square_in_q2(&f.evaluate(&q)));
        prop_assert!(is_squarefree(&f));
    }

    #[test]
    fn dispatch_results_verify(f in positive_poly(2)) {
        prop_assume!(is_squarefree(&f));
        if let DispatchOutcome::Reduced(r) = reduce_dispatch(&f).unwrap() {
            prop_assert!(r.verify());
            prop_assert_eq!(&r.input - &(&r.h * &r.h), r.residual.clone());
            prop_assert_eq!(r.residual_certificate.verdict, Verdict::Sos4);
        }
    }
}

#[test]
fn dispatch_gives_up_on_square_valued_sextic() {
    let f = RatPoly::from_ints(&[9, 0, 0, 4, 0, 0, 4]);
    assert!(matches!(reduce_dispatch(&f).unwrap(), DispatchOutcome::Inconclusive(_)));
}
