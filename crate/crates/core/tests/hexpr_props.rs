mod common;

use gradest::hexpr::{Expression, Nonlinearity};
use proptest::prelude::*;

use common::{
    corpus, expression_text, first_derivative_error, points, rng, second_derivative_error, PARAM_A,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_print_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let text = expression_text(&mut r, 4);
        let e: Expression = text.parse().unwrap();
        let printed = e.to_string();
        let again: Expression = printed.parse().unwrap();
        prop_assert_eq!(&again, &e);
        prop_assert_eq!(again.to_string(), printed);

        let params = [("a".to_string(), PARAM_A)].into_iter().collect();
        for s in points(&mut r, -2.0, 2.0, 100) {
            let a = e.evaluate(s, &params).map(f64::to_bits);
            let b = again.evaluate(s, &params).map(f64::to_bits);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn derivatives_round_trip_too(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e: Expression = expression_text(&mut r, 3).parse().unwrap();
        let d = e.differentiate().differentiate();
        let again: Expression = d.to_string().parse().unwrap();
        prop_assert_eq!(again, d);
    }
}

#[test]
fn first_derivatives_match_finite_differences() {
    let mut r = rng(11);
    let mut checked = 0;
    for h in corpus(7, 200) {
        let pts = points(&mut r, -2.0, 2.0, 50);
        if let Some(err) = first_derivative_error(&h, &pts) {
            assert!(err <= 1e-6, "{}: {err:e}", h.expression());
            checked += 1;
        }
    }
    assert!(
        checked >= 190,
        "only {checked} expressions were defined everywhere"
    );
}

#[test]
fn second_derivatives_match_finite_differences() {
    let mut r = rng(12);
    for h in corpus(8, 200) {
        let pts = points(&mut r, -2.0, 2.0, 20);
        if let Some(err) = second_derivative_error(&h, &pts) {
            assert!(err <= 1e-4, "{}: {err:e}", h.expression());
        }
    }
}

#[test]
fn example_families_differentiate_in_closed_form() {
    let h = Nonlinearity::parse("c * exp(d * s)", &[("c", 0.5), ("d", -2.0)]).unwrap();
    for s in [-1.0f64, 0.0, 0.3, 2.0] {
        let want = 0.5 * 4.0 * (-2.0 * s).exp();
        assert!((h.second_derivative(s).unwrap() - want).abs() <= 1e-14 * want.abs());
    }
    let h = Nonlinearity::parse("pi/2 - arctan(s)", &[]).unwrap();
    for s in [-3.0f64, 0.0, 5.0] {
        assert!((h.derivative(s).unwrap() + 1.0 / (1.0 + s * s)).abs() < 1e-15);
    }
}
