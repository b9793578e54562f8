//! Sampled checks of the hypothesis systems on `h`.
//!
//! Every check evaluates `h`, `h'` and `h''` (symbolic) at equally spaced
//! points of an `s = ln u` range and tests each inequality against
//! `-COND_TOLERANCE`. A pass means "no violation found at this resolution",
//! not a proof over all of ℝ.
//!
//! The general system for a given `λ`, dimension `n` and curvature bound `K`:
//!
//! ```text
//! -(4/n)(λ-1)h + (λ-2)h' + λh''      >= 0
//! h (2Kλ - (2/n)(λ²-1)h - λh')       >= 0
//! λh                                 >= 0
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hexpr::{EvalError, Nonlinearity};

/// Absolute slack on every inequality, absorbing round-off at analytic zeros.
pub const COND_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_S_RANGE: SRange = SRange { lo: -8.0, hi: 8.0 };
pub const DEFAULT_SAMPLES: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionSystem {
    /// The three-inequality system parameterized by `λ`.
    #[serde(rename = "1.9")]
    General,
    /// `h >= 0`, `h' <= 0`, `h'' >= 0`.
    #[serde(rename = "cor1.3")]
    DecreasingConvex,
    /// `h >= 0`, `h' <= min(h'', 2K)`.
    #[serde(rename = "cor1.4")]
    LambdaOne,
    /// `h' <= (2/n) h`.
    #[serde(rename = "cor1.5")]
    LambdaZero,
}

impl ConditionSystem {
    pub fn label(self) -> &'static str {
        match self {
            ConditionSystem::General => "1.9",
            ConditionSystem::DecreasingConvex => "cor1.3",
            ConditionSystem::LambdaOne => "cor1.4",
            ConditionSystem::LambdaZero => "cor1.5",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        [
            ConditionSystem::General,
            ConditionSystem::DecreasingConvex,
            ConditionSystem::LambdaOne,
            ConditionSystem::LambdaZero,
        ]
        .into_iter()
        .find(|sys| sys.label() == label)
    }

    /// Names of the inequalities, in evaluation order.
    pub fn inequalities(self) -> &'static [&'static str] {
        match self {
            ConditionSystem::General => &[
                "-(4/n)(lambda-1)h + (lambda-2)h' + lambda h'' >= 0",
                "h(2K lambda - (2/n)(lambda^2-1)h - lambda h') >= 0",
                "lambda h >= 0",
            ],
            ConditionSystem::DecreasingConvex => &["h >= 0", "h' <= 0", "h'' >= 0"],
            ConditionSystem::LambdaOne => &["h >= 0", "h' <= h''", "h' <= 2K"],
            ConditionSystem::LambdaZero => &["h' <= (2/n)h"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SRange {
    pub lo: f64,
    pub hi: f64,
}

impl SRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        SRange { lo, hi }
    }

    /// `samples` equally spaced points including both ends.
    pub fn points(self, samples: usize) -> impl Iterator<Item = f64> {
        let step = (self.hi - self.lo) / (samples - 1) as f64;
        (0..samples).map(move |i| {
            if i + 1 == samples {
                self.hi
            } else {
                self.lo + step * i as f64
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub s: f64,
    pub inequality: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub system: ConditionSystem,
    pub lambda: Option<f64>,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: f64,
    pub s_range: SRange,
    pub samples: usize,
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    /// Minimum over samples and inequalities of `value + COND_TOLERANCE`;
    /// non-negative exactly when the verdict is a pass.
    pub margin: f64,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConditionError {
    #[error("dimension n = {0} must be at least 2")]
    Dimension(usize),
    #[error("curvature bound K = {0} must be finite and non-negative")]
    Curvature(f64),
    #[error("need at least 2 samples, got {0}")]
    Samples(usize),
    #[error("s-range [{lo}, {hi}] must be finite with lo < hi")]
    Range { lo: f64, hi: f64 },
    #[error("lambda = {0} must be finite")]
    Lambda(f64),
    #[error("system {0} takes an explicit lambda; use check_system")]
    NotCorollary(&'static str),
    #[error("lambda grid is empty")]
    EmptyGrid,
    #[error("evaluating h at s = {s}")]
    Eval { s: f64, source: EvalError },
}

/// Shared inputs of every check.
#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    pub n: usize,
    pub k: f64,
    pub range: SRange,
    pub samples: usize,
}

impl Sampling {
    pub fn new(n: usize, k: f64, range: SRange, samples: usize) -> Self {
        Sampling {
            n,
            k,
            range,
            samples,
        }
    }

    fn validate(&self) -> Result<(), ConditionError> {
        if self.n < 2 {
            return Err(ConditionError::Dimension(self.n));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(ConditionError::Curvature(self.k));
        }
        if self.samples < 2 {
            return Err(ConditionError::Samples(self.samples));
        }
        let SRange { lo, hi } = self.range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ConditionError::Range { lo, hi });
        }
        Ok(())
    }
}

/// Left-hand sides of the inequalities of `system` at one jet `(h, h', h'')`.
fn lhs(system: ConditionSystem, lambda: f64, n: f64, k: f64, [h, dh, d2h]: [f64; 3]) -> Vec<f64> {
    match system {
        ConditionSystem::General => vec![
            -(4.0 / n) * (lambda - 1.0) * h + (lambda - 2.0) * dh + lambda * d2h,
            h * (2.0 * k * lambda - (2.0 / n) * (lambda * lambda - 1.0) * h - lambda * dh),
            lambda * h,
        ],
        ConditionSystem::DecreasingConvex => vec![h, -dh, d2h],
        ConditionSystem::LambdaOne => vec![h, d2h - dh, 2.0 * k - dh],
        ConditionSystem::LambdaZero => vec![(2.0 / n) * h - dh],
    }
}

fn run(
    h: &Nonlinearity,
    system: ConditionSystem,
    lambda: Option<f64>,
    sampling: &Sampling,
) -> Result<ConditionReport, ConditionError> {
    sampling.validate()?;
    let names = system.inequalities();
    let n = sampling.n as f64;
    let lam = lambda.unwrap_or(0.0);
    let mut violations = Vec::new();
    let mut margin = f64::INFINITY;
    for s in sampling.range.points(sampling.samples) {
        let jet = h
            .jet(s)
            .map_err(|source| ConditionError::Eval { s, source })?;
        for (value, name) in lhs(system, lam, n, sampling.k, jet).into_iter().zip(names) {
            let slack = value + COND_TOLERANCE;
            // NaN compares false here and is counted as a violation.
            if !(slack >= 0.0) {
                violations.push(Violation {
                    s,
                    inequality: name.to_string(),
                    value,
                });
            }
            margin = margin.min(if slack.is_nan() {
                f64::NEG_INFINITY
            } else {
                slack
            });
        }
    }
    let verdict = if violations.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ConditionReport {
        system,
        lambda,
        n: sampling.n,
        k: sampling.k,
        s_range: sampling.range,
        samples: sampling.samples,
        verdict,
        violations,
        margin,
    })
}

/// The general three-inequality system at a fixed `λ`.
pub fn check_system(
    h: &Nonlinearity,
    lambda: f64,
    sampling: &Sampling,
) -> Result<ConditionReport, ConditionError> {
    if !lambda.is_finite() {
        return Err(ConditionError::Lambda(lambda));
    }
    run(h, ConditionSystem::General, Some(lambda), sampling)
}

/// One of the sufficient-condition systems. `K` only enters
/// [`ConditionSystem::LambdaOne`], `n` only [`ConditionSystem::LambdaZero`].
pub fn check_corollary(
    h: &Nonlinearity,
    mode: ConditionSystem,
    sampling: &Sampling,
) -> Result<ConditionReport, ConditionError> {
    if mode == ConditionSystem::General {
        return Err(ConditionError::NotCorollary(mode.label()));
    }
    run(h, mode, None, sampling)
}

/// Every `λ` of the grid for which [`check_system`] passes, in grid order.
///
/// An empty result means no feasible `λ` was found on the grid.
pub fn find_lambda(
    h: &Nonlinearity,
    sampling: &Sampling,
    grid: &[f64],
) -> Result<Vec<(f64, ConditionReport)>, ConditionError> {
    if grid.is_empty() {
        return Err(ConditionError::EmptyGrid);
    }
    let reports: Vec<_> = grid
        .par_iter()
        .map(|&lambda| check_system(h, lambda, sampling).map(|r| (lambda, r)))
        .collect::<Result<_, _>>()?;
    Ok(reports.into_iter().filter(|(_, r)| r.passed()).collect())
}
