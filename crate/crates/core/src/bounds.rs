//! Explicit gradient-bound constants, the Harnack factor, and the range of
//! admissible solution values implied by the Lichnerowicz-type bounds.
//!
//! All three minimization branches share one shape. With `t` the free
//! Young-inequality constant on `(0, w)`,
//!
//! ```text
//! g(t) = (α t + β) / (R² t (w - t)),   β = C1²
//! ```
//!
//! where `α` and `w` depend on the bound:
//!
//! | bound       | α                                          | w              |
//! |-------------|--------------------------------------------|----------------|
//! | case 1      | (A + 2K + 2λ₁) R²                          | 2(2-p)/(n p)   |
//! | case 2      | (A + 2K) R²                                | 2(2-p)/(n p)   |
//! | general     | ((n-1)(1+√K R)+2) C1² + [C2] + 2K R²       | 2/n            |
//!
//! `g` tends to `+∞` at both ends and its derivative has the sign of
//! `α t² + 2β t - β w`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hexpr::{parse, Nonlinearity};
use crate::minimize::{bisect_stationary, minimize_open_interval, MinimizeError};

/// Strict margin kept from the ends of `1 < p < 2`.
pub const P_MARGIN: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-12;

/// Cut-off function constants: `|∇φ|²/φ <= C1²/R²` and the Laplacian
/// comparison term `C2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffConstants {
    pub c1: f64,
    pub c2: f64,
}

impl Default for CutoffConstants {
    /// Placeholder values; every report records the pair that was used.
    fn default() -> Self {
        CutoffConstants { c1: 2.0, c2: 2.0 }
    }
}

impl CutoffConstants {
    pub fn new(c1: f64, c2: f64) -> Result<Self, BoundError> {
        if !(c1 > 0.0 && c1.is_finite()) || !(c2 >= 0.0 && c2.is_finite()) {
            return Err(BoundError::Cutoff { c1, c2 });
        }
        Ok(CutoffConstants { c1, c2 })
    }
}

/// Dimension, curvature bound and ball radius of an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

impl Ball {
    pub fn new(n: usize, k: f64, r: f64) -> Result<Self, BoundError> {
        if n < 2 {
            return Err(BoundError::Dimension(n));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(BoundError::Curvature(k));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(BoundError::Radius(r));
        }
        Ok(Ball { n, k, r })
    }
}

/// Coefficients of `Δu + λ₁ u ln u + λ₂ u^(b+1) = 0` together with the free
/// exponent `p ∈ (1, 2)` of the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lichnerowicz {
    pub lambda1: f64,
    pub lambda2: f64,
    pub b: f64,
    pub p: f64,
}

impl Lichnerowicz {
    /// `h(s) = λ₁ s + λ₂ e^(b s)` with parameters `l1`, `l2`, `b` bound.
    pub fn nonlinearity(&self) -> Nonlinearity {
        let expr = parse("l1*s + l2*exp(b*s)").expect("fixed expression parses");
        let params = [("l1", self.lambda1), ("l2", self.lambda2), ("b", self.b)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        Nonlinearity::new(expr, params).expect("all parameters bound")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum ProblemSpec {
    /// `λ₁ > 0`, `λ₂ > 0`, `b <= 0`.
    Case1(Lichnerowicz),
    /// `λ₁ <= 0`, `λ₂ > 0`, `b <= 0`.
    Case2(Lichnerowicz),
    /// `Δu + u h(ln u) = 0` with the multiplier `λ` of the hypothesis system.
    General { h: Nonlinearity, lambda: f64 },
}

impl ProblemSpec {
    pub fn case1(lambda1: f64, lambda2: f64, b: f64, p: f64) -> Result<Self, BoundError> {
        let c = validate_lichnerowicz(lambda1, lambda2, b, p)?;
        if !(lambda1 > 0.0) {
            return Err(BoundError::Case { case: 1, lambda1 });
        }
        Ok(ProblemSpec::Case1(c))
    }

    pub fn case2(lambda1: f64, lambda2: f64, b: f64, p: f64) -> Result<Self, BoundError> {
        let c = validate_lichnerowicz(lambda1, lambda2, b, p)?;
        if !(lambda1 <= 0.0) {
            return Err(BoundError::Case { case: 2, lambda1 });
        }
        Ok(ProblemSpec::Case2(c))
    }

    /// Case 1 or case 2 according to the sign of `λ₁`.
    pub fn lichnerowicz(lambda1: f64, lambda2: f64, b: f64, p: f64) -> Result<Self, BoundError> {
        if lambda1 > 0.0 {
            Self::case1(lambda1, lambda2, b, p)
        } else {
            Self::case2(lambda1, lambda2, b, p)
        }
    }

    pub fn general(h: Nonlinearity, lambda: f64) -> Result<Self, BoundError> {
        if !lambda.is_finite() {
            return Err(BoundError::Lambda(lambda));
        }
        Ok(ProblemSpec::General { h, lambda })
    }

    /// The nonlinearity `h` this problem refers to.
    pub fn nonlinearity(&self) -> Nonlinearity {
        match self {
            ProblemSpec::Case1(c) | ProblemSpec::Case2(c) => c.nonlinearity(),
            ProblemSpec::General { h, .. } => h.clone(),
        }
    }
}

fn validate_lichnerowicz(
    lambda1: f64,
    lambda2: f64,
    b: f64,
    p: f64,
) -> Result<Lichnerowicz, BoundError> {
    if !lambda1.is_finite() {
        return Err(BoundError::Lambda(lambda1));
    }
    if !(lambda2 > 0.0 && lambda2.is_finite()) {
        return Err(BoundError::Lambda2(lambda2));
    }
    if !(b <= 0.0 && b.is_finite()) {
        return Err(BoundError::Exponent(b));
    }
    validate_p(p)?;
    Ok(Lichnerowicz {
        lambda1,
        lambda2,
        b,
        p,
    })
}

fn validate_p(p: f64) -> Result<(), BoundError> {
    if p > 1.0 + P_MARGIN && p < 2.0 - P_MARGIN {
        Ok(())
    } else {
        Err(BoundError::P(p))
    }
}

/// Which closed form the general bound uses: the constant as stated, or the
/// one the proof actually derives (which additionally carries `C2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantVariant {
    Stated,
    #[default]
    Proof,
}

impl ConstantVariant {
    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "stated" => Some(ConstantVariant::Stated),
            "proof" => Some(ConstantVariant::Proof),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Case1,
    Case2,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub label: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: f64,
    /// Index into `branches` of the branch attaining the maximum.
    pub branch: usize,
    pub branches: Vec<Branch>,
    pub minimizer: f64,
    /// Open interval `(0, minimizer_sup)` the minimizer was sought in.
    pub minimizer_sup: f64,
    pub scan_neighbors: [Option<f64>; 2],
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub variant: Option<ConstantVariant>,
    pub ball: Ball,
    pub cutoff: CutoffConstants,
}

impl BoundReport {
    pub fn attained(&self) -> &Branch {
        &self.branches[self.branch]
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("dimension n = {0} must be at least 2")]
    Dimension(usize),
    #[error("curvature bound K = {0} must be finite and non-negative")]
    Curvature(f64),
    #[error("radius R = {0} must be finite and positive")]
    Radius(f64),
    #[error("cut-off constants need C1 > 0 and C2 >= 0, got C1 = {c1}, C2 = {c2}")]
    Cutoff { c1: f64, c2: f64 },
    #[error("p = {0} must lie strictly inside (1, 2)")]
    P(f64),
    #[error("lambda = {0} must be finite")]
    Lambda(f64),
    #[error("lambda2 = {0} must be finite and positive")]
    Lambda2(f64),
    #[error("exponent b = {0} must be finite and <= 0")]
    Exponent(f64),
    #[error("case {case} does not admit lambda1 = {lambda1}")]
    Case { case: u8, lambda1: f64 },
    #[error("this operation needs a {0:?} problem")]
    WrongProblem(BoundKind),
    #[error("the solution range needs b < 0, got b = {0}")]
    NonNegativeExponent(f64),
    #[error("Harnack factor needs C >= 0, got {0}")]
    NegativeConstant(f64),
    #[error("no u > 0 satisfies the bound {bound}: the constant is below the minimum of the bounded quantity")]
    EmptyRange { bound: f64 },
    #[error("minimization failed: {0}")]
    Minimization(#[from] MinimizeError),
}

/// `A = (((n-1)(1 + √K R) + 2) C1² + C2) / R²`.
pub fn compute_a(ball: &Ball, cut: &CutoffConstants) -> f64 {
    let n = ball.n as f64;
    (((n - 1.0) * (1.0 + ball.k.sqrt() * ball.r) + 2.0) * cut.c1 * cut.c1 + cut.c2)
        / (ball.r * ball.r)
}

/// `L = n (p λ₁ + 2 p K) / (2 (p-1)²)`.
pub fn compute_l(n: usize, k: f64, p: f64, lambda1: f64) -> f64 {
    let n = n as f64;
    n * (p * lambda1 + 2.0 * p * k) / (2.0 * (p - 1.0).powi(2))
}

/// `(α t + β) / (R² t (w - t))` on `(0, w)`.
#[derive(Debug, Clone, Copy)]
struct InteriorObjective {
    alpha: f64,
    beta: f64,
    width: f64,
    r2: f64,
}

impl InteriorObjective {
    fn value(&self, t: f64) -> f64 {
        (self.alpha * t + self.beta) / (self.r2 * t * (self.width - t))
    }

    fn stationarity(&self, t: f64) -> f64 {
        self.alpha * t * t + 2.0 * self.beta * t - self.beta * self.width
    }

    fn minimize(&self) -> Result<Minimized, BoundError> {
        let coarse = minimize_open_interval(|t| self.value(t), self.width)?;
        let (lo, hi) = coarse.bracket;
        let mut x = coarse.x;
        let mut value = coarse.value;
        if let Some(root) =
            bisect_stationary(|t| self.stationarity(t), lo.max(f64::MIN_POSITIVE), hi)
        {
            let refined = self.value(root);
            // Golden-section values sit within rounding of the minimum; the
            // stationary point is kept unless it is measurably worse.
            if refined <= value + 8.0 * f64::EPSILON * value.abs() {
                x = root;
                value = refined;
            }
        }
        if !(value.is_finite() && x > 0.0 && x < self.width) {
            return Err(MinimizeError::NonFinite.into());
        }
        Ok(Minimized {
            x,
            value,
            neighbors: coarse.scan_neighbors,
        })
    }
}

struct Minimized {
    x: f64,
    value: f64,
    neighbors: [Option<f64>; 2],
}

fn argmax(branches: &[Branch]) -> (usize, f64) {
    branches
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, b)| {
            if b.value > bv {
                (i, b.value)
            } else {
                (bi, bv)
            }
        })
}

fn lichnerowicz_width(n: f64, p: f64) -> f64 {
    2.0 * (2.0 - p) / (n * p)
}

/// Bound for case 1 (`λ₁ > 0`): the maximum of the interior minimum and two
/// closed-form branches.
pub fn bound_case1(
    ball: &Ball,
    cut: &CutoffConstants,
    spec: &ProblemSpec,
) -> Result<BoundReport, BoundError> {
    let ProblemSpec::Case1(c) = spec else {
        return Err(BoundError::WrongProblem(BoundKind::Case1));
    };
    let Lichnerowicz { lambda1, p, .. } = *c;
    let n = ball.n as f64;
    let (k, r) = (ball.k, ball.r);
    let a = compute_a(ball, cut);
    let l = compute_l(ball.n, k, p, lambda1);
    let objective = InteriorObjective {
        alpha: (a + 2.0 * k + 2.0 * lambda1) * r * r,
        beta: cut.c1 * cut.c1,
        width: lichnerowicz_width(n, p),
        r2: r * r,
    };
    let m = objective.minimize()?;
    let second = n * a
        + n * n * cut.c1 * cut.c1 / (r * r)
        + 2.0 * k * n
        + n * (p - 2.0) * lambda1
        + n * p * lambda1;
    let third =
        n / (2.0 * (p - 1.0)) * ((2.0 / n) * (p - 1.0).powi(2) * l + p * lambda1 + 2.0 * p * k);
    let branches = vec![
        Branch {
            label: "interior-minimum",
            value: m.value,
        },
        Branch {
            label: "curvature",
            value: second,
        },
        Branch {
            label: "log-coefficient",
            value: third,
        },
    ];
    let (branch, value) = argmax(&branches);
    Ok(BoundReport {
        kind: BoundKind::Case1,
        value,
        branch,
        branches,
        minimizer: m.x,
        minimizer_sup: objective.width,
        scan_neighbors: m.neighbors,
        a: Some(a),
        l: Some(l),
        variant: None,
        ball: *ball,
        cutoff: *cut,
    })
}

/// Bound for case 2 (`λ₁ <= 0`).
pub fn bound_case2(
    ball: &Ball,
    cut: &CutoffConstants,
    spec: &ProblemSpec,
) -> Result<BoundReport, BoundError> {
    let ProblemSpec::Case2(c) = spec else {
        return Err(BoundError::WrongProblem(BoundKind::Case2));
    };
    let p = c.p;
    let n = ball.n as f64;
    let (k, r) = (ball.k, ball.r);
    let a = compute_a(ball, cut);
    let objective = InteriorObjective {
        alpha: (a + 2.0 * k) * r * r,
        beta: cut.c1 * cut.c1,
        width: lichnerowicz_width(n, p),
        r2: r * r,
    };
    let m = objective.minimize()?;
    let branches = vec![
        Branch {
            label: "curvature",
            value: n * k * p / (2.0 * (p - 1.0)),
        },
        Branch {
            label: "interior-minimum",
            value: m.value,
        },
    ];
    let (branch, value) = argmax(&branches);
    Ok(BoundReport {
        kind: BoundKind::Case2,
        value,
        branch,
        branches,
        minimizer: m.x,
        minimizer_sup: objective.width,
        scan_neighbors: m.neighbors,
        a: Some(a),
        l: None,
        variant: None,
        ball: *ball,
        cutoff: *cut,
    })
}

/// Bound `C(n, K, R, h)` of the general equation; independent of `h`.
pub fn bound_general(
    ball: &Ball,
    cut: &CutoffConstants,
    variant: ConstantVariant,
) -> Result<BoundReport, BoundError> {
    let n = ball.n as f64;
    let (k, r) = (ball.k, ball.r);
    let c2 = match variant {
        ConstantVariant::Stated => 0.0,
        ConstantVariant::Proof => cut.c2,
    };
    let objective = InteriorObjective {
        alpha: ((n - 1.0) * (1.0 + k.sqrt() * r) + 2.0) * cut.c1 * cut.c1 + c2 + 2.0 * k * r * r,
        beta: cut.c1 * cut.c1,
        width: 2.0 / n,
        r2: r * r,
    };
    let m = objective.minimize()?;
    Ok(BoundReport {
        kind: BoundKind::General,
        value: m.value,
        branch: 0,
        branches: vec![Branch {
            label: "interior-minimum",
            value: m.value,
        }],
        minimizer: m.x,
        minimizer_sup: objective.width,
        scan_neighbors: m.neighbors,
        a: None,
        l: None,
        variant: Some(variant),
        ball: *ball,
        cutoff: *cut,
    })
}

/// Dispatch on the problem kind.
pub fn bound_for(
    spec: &ProblemSpec,
    ball: &Ball,
    cut: &CutoffConstants,
    variant: ConstantVariant,
) -> Result<BoundReport, BoundError> {
    match spec {
        ProblemSpec::Case1(_) => bound_case1(ball, cut, spec),
        ProblemSpec::Case2(_) => bound_case2(ball, cut, spec),
        ProblemSpec::General { .. } => bound_general(ball, cut, variant),
    }
}

/// `e^(R √C)`: bounds `sup u / inf u` on the half ball.
pub fn harnack_factor(r: f64, c: f64) -> Result<f64, BoundError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(BoundError::Radius(r));
    }
    if !(c >= 0.0) {
        return Err(BoundError::NegativeConstant(c));
    }
    Ok((r * c.sqrt()).exp())
}

/// `{u > 0 : p λ₁ ln u + λ₂ u^b <= bound}` as an interval in `s = ln u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleRange {
    pub s_lo: f64,
    /// `None` when the range is unbounded above.
    pub s_hi: Option<f64>,
}

impl AdmissibleRange {
    pub fn u_min(&self) -> f64 {
        self.s_lo.exp()
    }

    pub fn u_max(&self) -> Option<f64> {
        self.s_hi.map(f64::exp)
    }

    pub fn contains(&self, u: f64) -> bool {
        let s = u.ln();
        s >= self.s_lo && self.s_hi.is_none_or(|hi| s <= hi)
    }
}

/// Admissible solution values implied by a case-1 or case-2 bound, after
/// dropping the non-negative gradient term.
pub fn solution_range_from_bound(
    spec: &ProblemSpec,
    bound: f64,
) -> Result<AdmissibleRange, BoundError> {
    let (c, bounded_above) = match spec {
        ProblemSpec::Case1(c) => (c, true),
        ProblemSpec::Case2(c) => (c, false),
        ProblemSpec::General { .. } => return Err(BoundError::WrongProblem(BoundKind::Case1)),
    };
    if !(c.b < 0.0) {
        return Err(BoundError::NonNegativeExponent(c.b));
    }
    let phi = |s: f64| c.p * c.lambda1 * s + c.lambda2 * (c.b * s).exp() - bound;
    let empty = BoundError::EmptyRange { bound };

    // A point inside the sublevel set.
    let inside = if phi(0.0) <= 0.0 {
        0.0
    } else if bounded_above {
        // φ is convex with its minimum where p λ₁ + λ₂ b e^(bs) = 0.
        let s_star = (c.p * c.lambda1 / (c.lambda2 * -c.b)).ln() / c.b;
        if phi(s_star) > 0.0 {
            return Err(empty);
        }
        s_star
    } else {
        // φ is non-increasing: march right.
        grow(&phi, 0.0, 1.0).ok_or(empty)?
    };

    let lo_out = grow(&|s| -phi(s), inside, -1.0).ok_or(BoundError::EmptyRange { bound })?;
    let s_lo = bisect_level(&phi, lo_out, inside);
    let s_hi = if bounded_above {
        let hi_out = grow(&|s| -phi(s), inside, 1.0).ok_or(BoundError::EmptyRange { bound })?;
        Some(bisect_level(&phi, hi_out, inside))
    } else {
        None
    };
    Ok(AdmissibleRange { s_lo, s_hi })
}

/// First point `from + dir·2^k` (k = 0, 1, ...) where `f <= 0`.
fn grow(f: &impl Fn(f64) -> f64, from: f64, dir: f64) -> Option<f64> {
    let mut step = 1.0;
    for _ in 0..64 {
        let s = from + dir * step;
        if f(s) <= 0.0 {
            return Some(s);
        }
        step *= 2.0;
    }
    None
}

/// Boundary of `{φ <= 0}` between `outside` (φ > 0) and `inside` (φ <= 0).
fn bisect_level(phi: &impl Fn(f64) -> f64, mut outside: f64, mut inside: f64) -> f64 {
    while (outside - inside).abs() > ROOT_TOL {
        let mid = 0.5 * (outside + inside);
        if mid == outside || mid == inside {
            break;
        }
        if phi(mid) <= 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(n: usize, k: f64, r: f64) -> Ball {
        Ball::new(n, k, r).unwrap()
    }

    fn cut(c1: f64, c2: f64) -> CutoffConstants {
        CutoffConstants::new(c1, c2).unwrap()
    }

    #[test]
    fn a_examples() {
        assert_eq!(compute_a(&ball(2, 0.0, 1.0), &cut(1.0, 1.0)), 4.0);
        assert_eq!(compute_a(&ball(3, 1.0, 2.0), &cut(2.0, 0.0)), 8.0);
        assert_eq!(compute_a(&ball(2, 0.0, 2.0), &cut(1.0, 1.0)), 1.0);
    }

    #[test]
    fn l_examples() {
        assert_eq!(compute_l(2, 0.0, 1.5, 1.0), 6.0);
        assert_eq!(compute_l(4, 0.0, 1.3, 0.0), 0.0);
        assert_eq!(compute_l(3, 1.0, 1.5, 0.0), 18.0);
    }

    #[test]
    fn case1_branches() {
        let spec = ProblemSpec::case1(1.0, 1.0, -1.0, 1.5).unwrap();
        let rep = bound_case1(&ball(2, 0.0, 1.0), &cut(1.0, 0.0), &spec).unwrap();
        let tau = (-6.0 + 96f64.sqrt()) / 10.0;
        let closed = 3.0 * (5.0 * tau + 3.0) / (tau * (1.0 - tau));
        assert!((rep.branches[0].value - closed).abs() < 1e-10 * closed);
        assert!((rep.minimizer - tau / 3.0).abs() < 1e-12);
        assert!((rep.branches[1].value - 12.0).abs() < 1e-12);
        assert!((rep.branches[2].value - 6.0).abs() < 1e-12);
        assert_eq!(rep.branch, 0);
        assert_eq!(rep.value, rep.branches[0].value);
        assert_eq!(rep.a, Some(3.0));
        assert_eq!(rep.l, Some(6.0));
    }

    #[test]
    fn case1_larger_c2_raises_a() {
        let spec = ProblemSpec::case1(1.0, 1.0, -1.0, 1.5).unwrap();
        let rep = bound_case1(&ball(2, 0.0, 1.0), &cut(1.0, 2.0), &spec).unwrap();
        assert_eq!(rep.a, Some(5.0));
        assert!((rep.branches[1].value - 16.0).abs() < 1e-12);
        assert!((rep.branches[2].value - 6.0).abs() < 1e-12);
        assert!(rep.value >= 16.0);
    }

    #[test]
    fn case2_examples() {
        let spec = ProblemSpec::case2(0.0, 1.0, -1.0, 1.5).unwrap();
        let rep = bound_case2(&ball(2, 0.0, 1.0), &cut(1.0, 0.0), &spec).unwrap();
        let closed = 27.0 + 18.0 * 2f64.sqrt();
        assert_eq!(rep.branches[0].value, 0.0);
        assert!((rep.value - closed).abs() < 1e-10 * closed);
        // τ = 3 t = √2 - 1
        assert!((3.0 * rep.minimizer - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        let rep = bound_case2(&ball(2, 1.0, 1.0), &cut(1.0, 0.0), &spec).unwrap();
        assert!((rep.branches[0].value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn general_examples() {
        for variant in [ConstantVariant::Stated, ConstantVariant::Proof] {
            let rep = bound_general(&ball(2, 0.0, 1.0), &cut(1.0, 0.0), variant).unwrap();
            assert!((rep.value - 9.0).abs() < 1e-12);
            assert!((rep.minimizer - 1.0 / 3.0).abs() < 1e-13);
            assert_eq!(rep.variant, Some(variant));
        }
        let rep =
            bound_general(&ball(2, 0.0, 1.0), &cut(1.0, 1.0), ConstantVariant::Proof).unwrap();
        let t = (-1.0 + 5f64.sqrt()) / 4.0;
        let closed = (4.0 * t + 1.0) / (t - t * t);
        assert!((rep.value - closed).abs() < 1e-12 * closed);
        assert!((rep.minimizer - t).abs() < 1e-13);
        let stated =
            bound_general(&ball(2, 0.0, 1.0), &cut(1.0, 1.0), ConstantVariant::Stated).unwrap();
        assert!((stated.value - 9.0).abs() < 1e-12);
    }

    #[test]
    fn general_scales_as_inverse_square_when_flat() {
        let base =
            bound_general(&ball(3, 0.0, 1.0), &cut(2.0, 2.0), ConstantVariant::Proof).unwrap();
        for r in [0.5, 3.0, 40.0] {
            let rep =
                bound_general(&ball(3, 0.0, r), &cut(2.0, 2.0), ConstantVariant::Proof).unwrap();
            assert!((rep.value * r * r - base.value).abs() < 1e-12 * base.value);
        }
    }

    #[test]
    fn minimizer_strictly_inside() {
        let spec = ProblemSpec::case1(3.0, 1.0, -0.5, 1.9).unwrap();
        let rep = bound_case1(&ball(5, 2.0, 0.3), &cut(2.0, 2.0), &spec).unwrap();
        assert!(rep.minimizer > 0.0 && rep.minimizer < rep.minimizer_sup);
        assert!(rep.branches.iter().all(|b| b.value <= rep.value));
    }

    #[test]
    fn problem_validation() {
        assert_eq!(
            ProblemSpec::case1(1.0, 1.0, -1.0, 2.5),
            Err(BoundError::P(2.5))
        );
        assert_eq!(
            ProblemSpec::case1(1.0, 1.0, -1.0, 1.0 + 1e-10),
            Err(BoundError::P(1.0 + 1e-10))
        );
        assert!(matches!(
            ProblemSpec::case1(0.0, 1.0, -1.0, 1.5),
            Err(BoundError::Case { case: 1, .. })
        ));
        assert!(matches!(
            ProblemSpec::case2(0.5, 1.0, -1.0, 1.5),
            Err(BoundError::Case { case: 2, .. })
        ));
        assert_eq!(
            ProblemSpec::case2(-1.0, 0.0, -1.0, 1.5),
            Err(BoundError::Lambda2(0.0))
        );
        assert_eq!(
            ProblemSpec::case2(-1.0, 1.0, 0.5, 1.5),
            Err(BoundError::Exponent(0.5))
        );
        assert!(matches!(
            ProblemSpec::lichnerowicz(-1.0, 1.0, -1.0, 1.5),
            Ok(ProblemSpec::Case2(_))
        ));
        assert!(matches!(
            ProblemSpec::lichnerowicz(1.0, 1.0, -1.0, 1.5),
            Ok(ProblemSpec::Case1(_))
        ));
        assert_eq!(Ball::new(1, 0.0, 1.0), Err(BoundError::Dimension(1)));
        assert_eq!(Ball::new(2, -1.0, 1.0), Err(BoundError::Curvature(-1.0)));
        assert_eq!(Ball::new(2, 0.0, 0.0), Err(BoundError::Radius(0.0)));
        assert!(CutoffConstants::new(0.0, 1.0).is_err());
        assert!(CutoffConstants::new(1.0, -1.0).is_err());
    }

    #[test]
    fn wrong_case_is_rejected() {
        let spec = ProblemSpec::case2(0.0, 1.0, -1.0, 1.5).unwrap();
        assert_eq!(
            bound_case1(&ball(2, 0.0, 1.0), &cut(1.0, 0.0), &spec),
            Err(BoundError::WrongProblem(BoundKind::Case1))
        );
    }

    #[test]
    fn harnack() {
        assert!((harnack_factor(1.0, 9.0).unwrap() - 20.085536923187668).abs() < 1e-12);
        assert_eq!(harnack_factor(1.0, 0.0).unwrap(), 1.0);
        assert!((harnack_factor(2.0, 9.0).unwrap() - 403.4287934927351).abs() < 1e-9);
        assert!(harnack_factor(1.0, -1.0).is_err());
    }

    #[test]
    fn range_case2_inverts_power() {
        let spec = ProblemSpec::case2(0.0, 1.0, -1.0, 1.5).unwrap();
        let range = solution_range_from_bound(&spec, 4.0).unwrap();
        assert!((range.u_min() - 0.25).abs() < 1e-11);
        assert_eq!(range.s_hi, None);
    }

    #[test]
    fn range_case1_is_compact() {
        let spec = ProblemSpec::case1(1.0, 1.0, -1.0, 1.5).unwrap();
        let range = solution_range_from_bound(&spec, 10.0).unwrap();
        let s_hi = range.s_hi.unwrap();
        assert!((1.5 * s_hi + (-s_hi).exp() - 10.0).abs() < 1e-10);
        assert!((s_hi - 6.6658).abs() < 1e-4);
        assert!((1.5 * range.s_lo + (-range.s_lo).exp() - 10.0).abs() < 1e-10);
        assert!((range.s_lo + 2.64).abs() < 0.01);
        assert!(range.contains(1.0));
        assert!(!range.contains(s_hi.exp() * 1.01));
    }

    #[test]
    fn range_empty_is_an_error() {
        let spec = ProblemSpec::case1(1.0, 1.0, -1.0, 1.5).unwrap();
        // min of 1.5 s + e^-s is 1.5(1 - ln 1.5) ≈ 0.892
        assert!(matches!(
            solution_range_from_bound(&spec, 0.5),
            Err(BoundError::EmptyRange { .. })
        ));
        let flat = ProblemSpec::case2(0.0, 1.0, -1.0, 1.5).unwrap();
        assert!(matches!(
            solution_range_from_bound(&flat, -1.0),
            Err(BoundError::EmptyRange { .. })
        ));
        let zero_b = ProblemSpec::case2(0.0, 1.0, 0.0, 1.5).unwrap();
        assert_eq!(
            solution_range_from_bound(&zero_b, 4.0),
            Err(BoundError::NonNegativeExponent(0.0))
        );
    }

    #[test]
    fn range_grows_with_bound() {
        let spec = ProblemSpec::case2(-1.0, 1.0, -1.0, 1.5).unwrap();
        let small = solution_range_from_bound(&spec, 2.0).unwrap();
        let large = solution_range_from_bound(&spec, 1e6).unwrap();
        assert!(large.s_lo < small.s_lo);
        assert!(large.u_min() < 1e-5);
    }
}
