mod common;

use proptest::prelude::*;
use rug::{Float, Integer, Rational};
use xili_core::li::{
    a1_closed_form, an_bounds_check, an_oracle, an_recurrence_residual, bridge_sides, li_an, li_an_streaming,
    recurrence_correction, sigma_table, BoundKind, CnpMode, CnpStream, CnpTable, LiCoefficients, LiMethod,
    EXACT_LIMIT,
};
use xili_core::precision::{printed_ulps, rel_diff};
use xili_core::series::binomial_ratio_coeffs;
use xili_core::Error;

use common::{ctx, li, sigma, xi};

#[test]
fn hand_rows() {
    let t = CnpTable::build(3, CnpMode::ExactRational, ctx()).unwrap();
    let q = |n, p| t.get_exact(n, p).unwrap().unwrap_or_default();
    assert_eq!(q(2, 2), 8);
    assert_eq!(q(3, 1), Rational::from((4, 3)));
    assert_eq!(q(3, 3), Rational::from((32, 3)));
    assert_eq!(q(3, 2), 0);
    assert_eq!(q(3, 1) + q(3, 3), 12);
}

#[test]
fn exact_mode_limit_is_reported() {
    let err = CnpTable::build(EXACT_LIMIT + 1, CnpMode::ExactRational, ctx()).unwrap_err();
    assert!(matches!(err, Error::ExactModeLimit { .. }));
}

#[test]
fn bigfloat_rows_track_the_exact_ones() {
    let exact = CnpTable::build(120, CnpMode::ExactRational, ctx()).unwrap();
    for row in CnpStream::new(ctx().prec()).take(120) {
        let n = row.n();
        for (p, c) in row.iter() {
            let e = Float::with_val(ctx().prec(), exact.get_exact(n, p).unwrap().unwrap());
            assert!(rel_diff(c, &e) < 1e-45, "({n},{p})");
        }
    }
}

#[test]
fn bigfloat_row_sums() {
    for row in CnpStream::new(ctx().prec()).take(1500).step_by(137) {
        let n = row.n();
        let sum: Float = row.values().iter().fold(ctx().zero(), |acc, c| acc + c);
        assert!(rel_diff(&sum, &ctx().float(4 * n as u32)) < 1e-45, "n = {n}");
    }
}

#[test]
fn sigma_examples() {
    let s = sigma();
    assert!(printed_ulps(s.get(1).unwrap(), "0.0028869636207651292268") <= 1.0);
    assert!(printed_ulps(s.get(0).unwrap(), "0.00287922181168589009") <= 1.0);
    let half_minus = Float::with_val(ctx().prec(), 0.5f64 - xi().get(0));
    assert!(rel_diff(s.get(0).unwrap(), &half_minus) < 1e-45);
    let log126 = Float::with_val(ctx().prec(), s.get(126).unwrap().ln_ref());
    assert!(printed_ulps(&log126, "231.6146084") <= 1.0);
    assert!(s.values().windows(2).skip(1).all(|w| w[1] > w[0]));
}

#[test]
fn sigma_refuses_without_enough_terms() {
    let err = sigma_table(400, &xi().truncated(40), ctx()).unwrap_err();
    assert!(matches!(err, Error::InsufficientTerms(_)), "{err:?}");
}

#[test]
fn a1_three_ways() {
    let closed = a1_closed_form(ctx());
    assert!(printed_ulps(&closed, "0.023095708966121033814") <= 1.0);
    assert!(rel_diff(li().get(1).unwrap(), &closed) < 1e-45);
    let oracle = an_oracle(1, xi(), ctx()).unwrap();
    assert!(rel_diff(oracle.get(1).unwrap(), &closed) < 1e-45);
}

#[test]
fn table_and_streaming_paths_agree() {
    let cnp = CnpTable::build(150, CnpMode::Bigfloat, ctx()).unwrap();
    let a = li_an(150, &cnp, sigma(), ctx()).unwrap();
    for n in 1..=150 {
        assert_eq!(a.get(n).unwrap(), li().get(n).unwrap(), "n = {n}");
    }
    assert!(li_an(151, &cnp, sigma(), ctx()).is_err());
}

/// a_n = 2 Σ_r (ξ_r/4^r) a_{2r}(n), unrolled with exact binomial-ratio
/// coefficients.
#[test]
fn oracle_definition_unrolled() {
    let oracle = an_oracle(10, xi(), ctx()).unwrap();
    for n in 1..=10usize {
        let mut sum = ctx().zero();
        for (r, x) in xi().values().iter().enumerate() {
            let coeff = &binomial_ratio_coeffs(2 * r as u32, n)[n];
            sum += Float::with_val(ctx().prec(), x * coeff) >> (2 * r as i32);
        }
        sum *= 2u32;
        assert!(rel_diff(oracle.get(n).unwrap(), &sum) < 1e-40, "n = {n}");
    }
}

#[test]
fn bridge_identity_exact() {
    let t = CnpTable::build(8, CnpMode::ExactRational, ctx()).unwrap();
    for n in 1..=8 {
        for r in 1..=6u32 {
            let (lhs, rhs) = bridge_sides(&t, n, r).unwrap();
            assert_eq!(Rational::from(lhs), rhs, "n = {n}, r = {r}");
        }
    }
    let float_table = CnpTable::build(8, CnpMode::Bigfloat, ctx()).unwrap();
    assert!(bridge_sides(&float_table, 3, 2).is_err());
}

#[test]
fn bounds_examples() {
    let l = li();
    let (a1, a2) = (l.get(1).unwrap(), l.get(2).unwrap());
    assert!(*a2 > Float::with_val(ctx().prec(), a1 * 2u32));
    let sixteen_sigma = Float::with_val(ctx().prec(), sigma().get(2).unwrap() * 16u32);
    assert!(rel_diff(a2, &sixteen_sigma) < 1e-45);
    let partial: Float = l.values()[..100].iter().fold(ctx().zero(), |acc, a| acc + a);
    assert!(partial > Float::with_val(ctx().prec(), a1 * 5050u32));
    let rep = an_bounds_check(l, sigma()).unwrap();
    assert!(rep.is_clean(), "{:?}", rep.violations);
    assert!(l.values().windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn bounds_report_a_corrupted_sequence() {
    let mut values = li().truncated(30).values().to_vec();
    values[19] = Float::with_val(ctx().prec(), &values[17] * 0.9f64);
    let bad = LiCoefficients::new(values, LiMethod::Imported, 50).unwrap();
    let rep = an_bounds_check(&bad, sigma()).unwrap();
    let kinds: Vec<BoundKind> = rep.violations.iter().filter(|v| v.n == 20).map(|v| v.kind).collect();
    for k in [BoundKind::Monotone, BoundKind::StepTwo, BoundKind::Recurrence, BoundKind::RecurrenceMin] {
        assert!(kinds.contains(&k), "{k:?} missing from {kinds:?}");
    }
}

#[test]
fn recurrence_residuals() {
    let cnp = CnpTable::build(60, CnpMode::Bigfloat, ctx()).unwrap();
    for n in [3, 10, 60] {
        let r = an_recurrence_residual(li(), &cnp, sigma(), n).unwrap();
        let scale = Float::with_val(ctx().prec(), li().get(n).unwrap() * 1e-40f64);
        assert!(r.abs() < scale, "n = {n}");
        assert!(recurrence_correction(&cnp, sigma(), n, ctx().prec()).unwrap() > 0);
    }
    assert!(an_recurrence_residual(li(), &cnp, sigma(), 62).is_err());
}

#[test]
fn precision_stability_of_the_last_coefficient() {
    let hi = ctx().with_extra_digits(20);
    let table = xili_core::xi::xi_r_table(common::TERMS, &hi).unwrap();
    let sig = sigma_table(common::N, &table, &hi).unwrap();
    let a = li_an_streaming(common::N, &sig, &hi).unwrap();
    let d = rel_diff(a.get(common::N).unwrap(), li().get(common::N).unwrap());
    assert!(d < 1e-45, "{}", d.to_f64());
}

#[test]
fn published_values() {
    assert!(printed_ulps(li().get(500).unwrap(), "76866613328.68761582736719") <= 1.0);
    assert!(printed_ulps(li().get(1000).unwrap(), "1046191872311269880.657298") <= 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_triangle_invariants(n in 1usize..=60) {
        let t = CnpTable::build(n, CnpMode::ExactRational, ctx()).unwrap();
        let mut sum = Rational::new();
        for p in 1..=n {
            let c = t.get_exact(n, p).unwrap().unwrap_or_default();
            prop_assert_eq!((n + p) % 2 == 0, c > 0);
            sum += c;
        }
        prop_assert_eq!(sum, Rational::from(4 * n as u32));
        let fact = Integer::from(Integer::factorial(n as u32));
        let four = Integer::from(Integer::u_pow_u(4, n as u32));
        prop_assert_eq!(t.get_exact(n, n).unwrap().unwrap(), Rational::from((four, fact)));
    }
}
