use gradest::geometry::ManifoldModel;
use gradest::hexpr::Nonlinearity;
use gradest::solver::{solve_radial, RadialSolution, SolverOptions, Termination};
use proptest::prelude::*;

fn h(text: &str) -> Nonlinearity {
    Nonlinearity::parse(text, &[]).unwrap()
}

fn gaussian_error(tol: f64) -> f64 {
    let model = ManifoldModel::euclidean(3).unwrap();
    let sol = solve_radial(
        &model,
        &h("4*s + 6"),
        1.0,
        3.0,
        &SolverOptions {
            tol,
            ..Default::default()
        },
    )
    .unwrap();
    sol.r()
        .iter()
        .zip(sol.u())
        .map(|(r, u)| (u - (-r * r).exp()).abs())
        .fold(0.0, f64::max)
}

/// Root of `s = e^{-s}` by bisection.
fn omega() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if mid - (-mid).exp() < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

fn assert_invariants(sol: &RadialSolution) {
    assert_eq!(sol.r()[0], 0.0);
    assert_eq!(sol.du()[0], 0.0);
    assert!(sol.r().windows(2).all(|w| w[0] < w[1]));
    let floor = sol.options().floor_ratio * sol.u0();
    assert!(sol.u().iter().all(|&u| u >= floor));
}

#[test]
fn halving_tol_reduces_gaussian_error() {
    let mut tol = 1e-4;
    let mut last = f64::INFINITY;
    while tol >= 1e-10 {
        let err = gaussian_error(tol);
        assert!(err < last, "tol {tol:e}: {err:e} >= {last:e}");
        last = err;
        tol /= 2.0;
    }
    assert!(gaussian_error(1e-10) <= 1e-8);
}

#[test]
fn lichnerowicz_constant_solution() {
    let om = omega();
    assert!((om - 0.567143).abs() < 1e-6);
    let model = ManifoldModel::euclidean(2).unwrap();
    let sol = solve_radial(
        &model,
        &h("-s + exp(-s)"),
        om.exp(),
        4.0,
        &SolverOptions::default(),
    )
    .unwrap();
    assert_invariants(&sol);
    assert!(sol.u().iter().all(|u| (u - om.exp()).abs() <= 1e-12));
    assert!(sol.du().iter().all(|du| du.abs() <= 1e-12));
}

#[test]
fn equal_nonlinearities_give_equal_solutions() {
    let pairs = [
        ("exp(-s)", "1/exp(s)"),
        ("4*s + 6", "2*(2*s + 3)"),
        ("2*exp(-0.5*s)", "2/exp(s/2)"),
    ];
    for model in [
        ManifoldModel::euclidean(3).unwrap(),
        ManifoldModel::hyperbolic(2, -1.0).unwrap(),
    ] {
        for (a, b) in pairs {
            let opts = SolverOptions::default();
            let sa = solve_radial(&model, &h(a), 1.0, 2.0, &opts).unwrap();
            let sb = solve_radial(&model, &h(b), 1.0, 2.0, &opts).unwrap();
            assert_eq!(sa.len(), sb.len());
            for (x, y) in sa.u().iter().zip(sb.u()) {
                assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()), "{a} vs {b}");
            }
        }
    }
}

/// `u(r) = 1 + ∫₀^r u'` for `Δu = -1` on hyperbolic 3-space, where
/// `u'(t) = -(sinh t cosh t - t) / (2 sinh² t)`, by composite Simpson.
fn unit_forcing_profile(r: f64) -> f64 {
    let du = |t: f64| {
        if t < 1e-3 {
            -t / 3.0 + t.powi(3) / 45.0
        } else {
            -(t.sinh() * t.cosh() - t) / (2.0 * t.sinh().powi(2))
        }
    };
    let m = 2000;
    let step = r / m as f64;
    let mut sum = du(0.0) + du(r);
    for i in 1..m {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * du(i as f64 * step);
    }
    1.0 + sum * step / 3.0
}

#[test]
fn decreasing_exponential_on_hyperbolic_space() {
    // h = e^{-s} gives Δu = -1: u decreases and vanishes near r = 2.9847
    let model = ManifoldModel::hyperbolic(3, -1.0).unwrap();
    let sol = solve_radial(&model, &h("exp(-s)"), 1.0, 4.0, &SolverOptions::default()).unwrap();
    assert_eq!(sol.termination(), Termination::HitFloor);
    assert_invariants(&sol);
    assert!(sol.u().windows(2).all(|w| w[1] < w[0]));
    for (r, u) in sol.r().iter().zip(sol.u()).step_by(97) {
        assert!((u - unit_forcing_profile(*r)).abs() < 1e-8, "r = {r}");
    }
    let (mut lo, mut hi) = (2.0, 3.5);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if unit_forcing_profile(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    assert!(
        (sol.reached() - lo).abs() < 1e-6,
        "{} vs {lo}",
        sol.reached()
    );

    let covered = solve_radial(&model, &h("exp(-s)"), 1.0, 2.0, &SolverOptions::default()).unwrap();
    assert_eq!(covered.termination(), Termination::ReachedRmax);
    assert!(covered.residual().unwrap() <= 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn residual_is_small_on_exponential_family(
        c in 0.5f64..2.0,
        d in -2.0f64..-0.5,
        u0 in 0.5f64..2.0,
        n in 2usize..4,
        hyperbolic in any::<bool>(),
    ) {
        let model = ManifoldModel::new(n, if hyperbolic { -1.0 } else { 0.0 }).unwrap();
        let h = Nonlinearity::parse("c * exp(d * s)", &[("c", c), ("d", d)]).unwrap();
        let sol = solve_radial(&model, &h, u0, 2.0, &SolverOptions::default()).unwrap();
        assert_invariants(&sol);
        if sol.termination() == Termination::ReachedRmax {
            prop_assert!(sol.residual().unwrap() <= 1e-5);
        }
    }
}
