//! Shared generators for integration tests.
#![allow(dead_code)]

use gradest::hexpr::Nonlinearity;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Value bound to the parameter `a` in generated expressions.
pub const PARAM_A: f64 = 0.7;

/// Random expression text in `s` and `a` that is defined and moderate in
/// size on `[-2, 2]`. Logarithms and quotients only appear with arguments
/// bounded away from zero.
pub fn expression_text(rng: &mut impl Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..5) {
            0 | 1 => "s".to_string(),
            2 => format!("({:.2})", rng.gen_range(-3.0..3.0)),
            3 => "a".to_string(),
            _ => "pi".to_string(),
        };
    }
    let sub = |rng: &mut _| expression_text(rng, depth - 1);
    match rng.gen_range(0..12) {
        0 => format!("({} + {})", sub(rng), sub(rng)),
        1 => format!("({} - {})", sub(rng), sub(rng)),
        2 | 3 => format!("({} * {})", sub(rng), sub(rng)),
        4 => format!("({} / (2 + cos({})))", sub(rng), sub(rng)),
        5 => format!("sin({})", sub(rng)),
        6 => format!("cos({})", sub(rng)),
        7 => format!("arctan({})", sub(rng)),
        8 => format!("exp(0.5 * arctan({}))", sub(rng)),
        9 => format!("ln(1 + ({})^2)", sub(rng)),
        10 => format!("(1 + ({})^2)^0.5", sub(rng)),
        _ => format!("-(({})^{})", sub(rng), rng.gen_range(2..4)),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The acceptance corpus: `count` expressions from a fixed seed.
pub fn corpus(seed: u64, count: usize) -> Vec<Nonlinearity> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let depth = rng.gen_range(1..5);
            let text = expression_text(&mut rng, depth);
            Nonlinearity::parse(&text, &[("a", PARAM_A)]).unwrap_or_else(|e| panic!("{text}: {e}"))
        })
        .collect()
}

/// `max(|symbolic - central difference|/(1 + |symbolic|))` for the first
/// derivative (step `1e-6`) over the given points; `None` if any point is
/// outside the domain.
pub fn first_derivative_error(h: &Nonlinearity, points: &[f64]) -> Option<f64> {
    let step = 1e-6;
    let mut worst: f64 = 0.0;
    for &s in points {
        let exact = h.derivative(s).ok()?;
        let fd = (h.value(s + step).ok()? - h.value(s - step).ok()?) / (2.0 * step);
        worst = worst.max((exact - fd).abs() / (1.0 + exact.abs()));
    }
    Some(worst)
}

/// As [`first_derivative_error`] for the second derivative against the
/// second-order central difference with step `1e-4`.
pub fn second_derivative_error(h: &Nonlinearity, points: &[f64]) -> Option<f64> {
    let step = 1e-4;
    let mut worst: f64 = 0.0;
    for &s in points {
        let exact = h.second_derivative(s).ok()?;
        let fd = (h.value(s + step).ok()? - 2.0 * h.value(s).ok()? + h.value(s - step).ok()?)
            / (step * step);
        worst = worst.max((exact - fd).abs() / (1.0 + exact.abs()));
    }
    Some(worst)
}

/// `count` points uniformly distributed in `[lo, hi]`.
pub fn points(rng: &mut impl Rng, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Parameters of one bound evaluation.
#[derive(Debug, Clone, Copy)]
pub struct BoundTuple {
    pub n: usize,
    pub k: f64,
    pub r: f64,
    pub c1: f64,
    pub c2: f64,
    pub p: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Case1,
    Case2,
    General,
}

pub fn bound_tuple(rng: &mut impl Rng, which: Which) -> BoundTuple {
    BoundTuple {
        n: rng.gen_range(2..7),
        k: rng.gen_range(0.0..4.0),
        r: rng.gen_range(0.2..5.0),
        c1: rng.gen_range(0.5..3.0),
        c2: rng.gen_range(0.0..3.0),
        p: rng.gen_range(1.05..1.95),
        lambda1: match which {
            Which::Case1 => rng.gen_range(0.05..3.0),
            _ => rng.gen_range(-3.0..=0.0),
        },
        lambda2: rng.gen_range(0.1..3.0),
        b: rng.gen_range(-3.0..=0.0),
    }
}

impl BoundTuple {
    pub fn a(&self) -> f64 {
        let n = self.n as f64;
        (((n - 1.0) * (1.0 + self.k.sqrt() * self.r) + 2.0) * self.c1 * self.c1 + self.c2)
            / (self.r * self.r)
    }

    /// Open interval of the minimized variable.
    pub fn width(&self, which: Which) -> f64 {
        let n = self.n as f64;
        match which {
            Which::General => 2.0 / n,
            _ => 2.0 * (2.0 - self.p) / (n * self.p),
        }
    }

    /// The minimized objective, written out directly from the displayed
    /// constants. `proof` selects the general numerator carrying `C2`.
    pub fn objective(&self, which: Which, proof: bool, t: f64) -> f64 {
        let n = self.n as f64;
        let (k, r, c1, p) = (self.k, self.r, self.c1, self.p);
        match which {
            Which::Case1 | Which::Case2 => {
                let extra = if which == Which::Case1 {
                    2.0 * self.lambda1
                } else {
                    0.0
                };
                ((self.a() + 2.0 * k + extra) * r * r * t + c1 * c1) * n * p
                    / ((2.0 * (2.0 - p) - t * n * p) * r * r * t)
            }
            Which::General => {
                let c2 = if proof { self.c2 } else { 0.0 };
                (((n - 1.0) * (1.0 + k.sqrt() * r) + 2.0 + 1.0 / t) * c1 * c1
                    + c2
                    + 2.0 * k * r * r)
                    / (r * r * (2.0 / n - t))
            }
        }
    }

    /// Minimum over a uniform grid of `points` interior points.
    pub fn grid_minimum(&self, which: Which, proof: bool, points: usize) -> f64 {
        let w = self.width(which);
        (1..=points)
            .map(|i| self.objective(which, proof, w * i as f64 / (points + 1) as f64))
            .fold(f64::INFINITY, f64::min)
    }
}
