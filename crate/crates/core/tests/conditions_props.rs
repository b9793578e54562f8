mod common;

use gradest::conditions::{
    check_corollary, check_system, find_lambda, ConditionSystem, SRange, Sampling,
};
use gradest::hexpr::Nonlinearity;
use proptest::prelude::*;

fn sampling(n: usize, k: f64) -> Sampling {
    Sampling::new(n, k, SRange::new(-4.0, 4.0), 161)
}

fn family(c: f64, d: f64) -> Nonlinearity {
    Nonlinearity::parse("c * exp(d * s)", &[("c", c), ("d", d)]).unwrap()
}

/// Samplewise evaluation of explicit inequalities, independent of the
/// library's condition tables.
fn holds_everywhere(h: &Nonlinearity, samp: &Sampling, test: impl Fn([f64; 3]) -> bool) -> bool {
    samp.range
        .points(samp.samples)
        .all(|s| test(h.jet(s).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decreasing_convex_implies_general_system(c in 0.0f64..3.0, d in -3.0f64..0.0, n in 2usize..7, k in 0.0f64..4.0) {
        let h = family(c, d);
        let samp = sampling(n, k);
        prop_assert!(check_corollary(&h, ConditionSystem::DecreasingConvex, &samp).unwrap().passed());
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            prop_assert!(check_system(&h, lambda, &samp).unwrap().passed(), "lambda = {}", lambda);
        }
    }

    #[test]
    fn lambda_one_specializes(seed in any::<u64>(), n in 2usize..6, k in 0.0f64..3.0) {
        let mut rng = common::rng(seed);
        let h = Nonlinearity::parse(&common::expression_text(&mut rng, 3), &[("a", common::PARAM_A)]).unwrap();
        let samp = sampling(n, k);
        let general = check_system(&h, 1.0, &samp);
        let corollary = check_corollary(&h, ConditionSystem::LambdaOne, &samp);
        if let (Ok(general), Ok(corollary)) = (general, corollary) {
            // at λ = 1 the system reads h'' - h' >= 0, h (2K - h') >= 0, h >= 0
            let direct = holds_everywhere(&h, &samp, |[v, d1, d2]| {
                d2 - d1 >= -1e-12 && v * (2.0 * k - d1) >= -1e-12 && v >= -1e-12
            });
            prop_assert_eq!(general.passed(), direct);
            let strict = holds_everywhere(&h, &samp, |[v, d1, d2]| {
                d2 - d1 >= -1e-12 && 2.0 * k - d1 >= -1e-12 && v >= -1e-12
            });
            prop_assert_eq!(corollary.passed(), strict);
            if corollary.passed() {
                prop_assert!(general.passed());
            }
        }
    }

    #[test]
    fn lambda_zero_specializes(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = common::rng(seed);
        let h = Nonlinearity::parse(&common::expression_text(&mut rng, 3), &[("a", common::PARAM_A)]).unwrap();
        let samp = sampling(n, 0.0);
        if let (Ok(general), Ok(corollary)) =
            (check_system(&h, 0.0, &samp), check_corollary(&h, ConditionSystem::LambdaZero, &samp))
        {
            // at λ = 0 the system reads 2((2/n) h - h') >= 0, (2/n) h² >= 0, 0 >= 0
            let nf = n as f64;
            let direct = holds_everywhere(&h, &samp, |[v, d1, _]| 2.0 * (2.0 / nf * v - d1) >= -1e-12);
            prop_assert_eq!(general.passed(), direct);
            let reduced = holds_everywhere(&h, &samp, |[v, d1, _]| 2.0 / nf * v - d1 >= -1e-12);
            prop_assert_eq!(corollary.passed(), reduced);
        }
    }

    #[test]
    fn reports_are_deterministic(seed in any::<u64>(), lambda in -1.0f64..2.0) {
        let mut rng = common::rng(seed);
        let h = Nonlinearity::parse(&common::expression_text(&mut rng, 3), &[("a", common::PARAM_A)]).unwrap();
        let samp = sampling(3, 1.0);
        prop_assert_eq!(check_system(&h, lambda, &samp), check_system(&h, lambda, &samp));
        let grid = [0.0, 0.5, 1.0];
        prop_assert_eq!(find_lambda(&h, &samp, &grid), find_lambda(&h, &samp, &grid));
    }

    #[test]
    fn margin_sign_matches_verdict(seed in any::<u64>(), lambda in 0.0f64..1.0) {
        let mut rng = common::rng(seed);
        let h = Nonlinearity::parse(&common::expression_text(&mut rng, 3), &[("a", common::PARAM_A)]).unwrap();
        if let Ok(rep) = check_system(&h, lambda, &sampling(3, 0.0)) {
            prop_assert_eq!(rep.passed(), rep.margin >= 0.0);
            prop_assert_eq!(rep.passed(), rep.violations.is_empty());
        }
    }
}

#[test]
fn feasible_sets_of_examples() {
    let full = Sampling::new(3, 0.0, SRange::new(-8.0, 8.0), 401);
    let grid = [0.0, 0.5, 1.0];
    let feasible = |h: &str, samp: &Sampling| -> Vec<f64> {
        let h = Nonlinearity::parse(h, &[]).unwrap();
        find_lambda(&h, samp, &grid)
            .unwrap()
            .into_iter()
            .map(|(l, _)| l)
            .collect()
    };
    assert_eq!(feasible("-exp(2*s)", &full), vec![0.0]);
    assert_eq!(feasible("exp(-s)", &full), vec![0.0, 0.5, 1.0]);
    let narrow = Sampling::new(3, 0.0, SRange::new(-2.0, 2.0), 401);
    assert!(feasible("s * exp(s)", &narrow).is_empty());
}
