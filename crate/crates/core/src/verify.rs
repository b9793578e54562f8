//! Checking gradient, Harnack and Liouville conclusions along radial
//! solutions.
//!
//! Every gradient check gates on its premises before it compares numbers:
//! the solution must reach `2R`, the model's Ricci bound must not exceed
//! `K`, and for general problems the hypothesis system must hold over the
//! `ln u` range the solution actually traverses, widened by
//! [`HYPOTHESIS_WIDENING`] on both sides. A failed gate yields
//! [`Verdict::NotApplicable`] or [`Verdict::NoVerdict`], never a failure.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    bound_for, harnack_factor, Ball, BoundError, BoundReport, ConstantVariant, CutoffConstants,
    ProblemSpec,
};
use crate::conditions::{
    check_system, ConditionError, ConditionReport, SRange, Sampling, DEFAULT_SAMPLES,
};
use crate::geometry::ManifoldModel;
use crate::hexpr::{EvalError, Nonlinearity};
use crate::solver::{solve_radial, RadialSolution, SolveError, SolverOptions, Termination};

pub const VERIFY_SLACK: f64 = 1e-9;
pub const HYPOTHESIS_WIDENING: f64 = 0.5;
const MATCH_PROBES: usize = 17;
const MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "Thm1.1-Case1")]
    LichnerowiczCase1,
    #[serde(rename = "Thm1.1-Case2")]
    LichnerowiczCase2,
    #[serde(rename = "Thm1.2")]
    General,
    #[serde(rename = "Cor1.1")]
    Harnack,
    #[serde(rename = "Cor1.2-scan")]
    Liouville,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    NoVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub theorem: Theorem,
    /// The gradient constant `C` behind the check.
    pub bound: BoundReport,
    /// What the statistic is compared against: `C` for gradient checks,
    /// `e^(R √C)` for Harnack checks.
    pub bound_value: f64,
    /// `sup G` over `[0, R]` or `sup u / inf u` over `[0, R/2]`, when the
    /// solution covers that interval.
    pub statistic: Option<f64>,
    /// Radius where the statistic's supremum is attained.
    pub at: Option<f64>,
    pub margin: Option<f64>,
    pub verdict: Verdict,
    pub hypotheses: Option<ConditionReport>,
    /// Why the verdict is not pass or fail.
    pub reason: Option<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifySettings {
    pub cutoff: CutoffConstants,
    pub variant: ConstantVariant,
    /// Relative slack: pass iff `margin >= -slack (1 + |C|)`.
    pub slack: f64,
    /// Samples of the hypothesis check over the traversed range.
    pub samples: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            cutoff: CutoffConstants::default(),
            variant: ConstantVariant::default(),
            slack: VERIFY_SLACK,
            samples: DEFAULT_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("ball dimension n = {ball} differs from the model dimension {model}")]
    Dimension { ball: usize, model: usize },
    #[error("problem nonlinearity differs from the solution's at s = {s}: {spec} vs {solution}")]
    Mismatch { s: f64, spec: f64, solution: f64 },
    #[error("Harnack checks need a general problem")]
    HarnackNeedsGeneral,
    #[error("radius list must be non-empty, positive and increasing")]
    Radii,
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Conditions(#[from] ConditionError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Largest sample on a uniform grid, refined by the vertex of the parabola
/// through the discrete maximum and its neighbours. Returns `(x, y)`.
pub fn refined_max(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let (i, &y0) = ys.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if i == 0 || i + 1 == ys.len() {
        return Some((xs[i], y0));
    }
    let (ym, yp) = (ys[i - 1], ys[i + 1]);
    let curv = ym - 2.0 * y0 + yp;
    if !(curv < 0.0) {
        return Some((xs[i], y0));
    }
    let delta = 0.5 * (ym - yp) / curv;
    let vertex = y0 - 0.25 * (ym - yp) * delta;
    let dx = xs[i + 1] - xs[i];
    Some((xs[i] + delta * dx, vertex.max(y0)))
}

/// Smallest sample with the same refinement as [`refined_max`].
pub fn refined_min(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
    refined_max(xs, &neg).map(|(x, y)| (x, -y))
}

fn theorem_for(spec: &ProblemSpec) -> Theorem {
    match spec {
        ProblemSpec::Case1(_) => Theorem::LichnerowiczCase1,
        ProblemSpec::Case2(_) => Theorem::LichnerowiczCase2,
        ProblemSpec::General { .. } => Theorem::General,
    }
}

/// Reject a problem whose `h` disagrees with the solution's on the `ln u`
/// range the solution traverses.
fn check_match(sol: &RadialSolution, spec: &ProblemSpec) -> Result<(), VerifyError> {
    let (lo, hi) = sol.log_range();
    let spec_h = spec.nonlinearity();
    for i in 0..MATCH_PROBES {
        let s = lo + (hi - lo) * i as f64 / (MATCH_PROBES - 1) as f64;
        let a = spec_h.value(s);
        let b = sol.nonlinearity().value(s);
        match (a, b) {
            (Ok(a), Ok(b)) if (a - b).abs() <= MATCH_TOL * (1.0 + a.abs() + b.abs()) => {}
            (Err(_), Err(_)) => {}
            (a, b) => {
                return Err(VerifyError::Mismatch {
                    s,
                    spec: a.unwrap_or(f64::NAN),
                    solution: b.unwrap_or(f64::NAN),
                })
            }
        }
    }
    Ok(())
}

/// The bounded quantity at every sample: `(u'/u)² + p λ₁ ln u + λ₂ u^b` for
/// the Lichnerowicz cases, `(u'/u)² + λ h(ln u)` for general problems.
pub fn compute_g(sol: &RadialSolution, spec: &ProblemSpec) -> Result<Vec<f64>, VerifyError> {
    check_match(sol, spec)?;
    let grad = sol.log_gradient();
    sol.u()
        .iter()
        .zip(grad)
        .map(|(&u, g)| {
            let s = u.ln();
            let tail = match spec {
                ProblemSpec::Case1(c) | ProblemSpec::Case2(c) => {
                    c.p * c.lambda1 * s + c.lambda2 * (c.b * s).exp()
                }
                ProblemSpec::General { h, lambda } => lambda * h.value(s)?,
            };
            Ok(g * g + tail)
        })
        .collect()
}

/// Number of samples with `r <= radius`.
fn prefix(sol: &RadialSolution, radius: f64) -> usize {
    let eps = 1e-12 * sol.r_max();
    sol.r().partition_point(|&r| r <= radius + eps)
}

fn verdict_for(margin: f64, reference: f64, slack: f64) -> Verdict {
    if margin >= -slack * (1.0 + reference.abs()) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Compare `sup G` over `[0, R]` with the matching gradient bound.
pub fn verify_gradient_bound(
    sol: &RadialSolution,
    spec: &ProblemSpec,
    ball: &Ball,
    settings: &VerifySettings,
) -> Result<VerificationReport, VerifyError> {
    let model = sol.model();
    if ball.n != model.dimension() {
        return Err(VerifyError::Dimension {
            ball: ball.n,
            model: model.dimension(),
        });
    }
    let g = compute_g(sol, spec)?;
    let bound = bound_for(spec, ball, &settings.cutoff, settings.variant)?;
    let c = bound.value;

    let mut report = VerificationReport {
        theorem: theorem_for(spec),
        bound,
        bound_value: c,
        statistic: None,
        at: None,
        margin: None,
        verdict: Verdict::NoVerdict,
        hypotheses: None,
        reason: None,
    };
    if sol.covers(ball.r) {
        let m = prefix(sol, ball.r);
        let (at, sup) = refined_max(&sol.r()[..m], &g[..m]).expect("solution has samples");
        report.statistic = Some(sup);
        report.at = Some(at);
        report.margin = Some(c - sup);
    }

    if !sol.covers(2.0 * ball.r) {
        report.reason = Some(format!(
            "solution stopped at r = {} before 2R = {} ({:?})",
            sol.reached(),
            2.0 * ball.r,
            sol.termination()
        ));
        return Ok(report);
    }
    let ricci = model.ricci_bound();
    if ball.k < ricci * (1.0 - 1e-12) {
        report.verdict = Verdict::NotApplicable;
        report.reason = Some(format!(
            "model Ricci bound -{ricci} lies below -K = -{}",
            ball.k
        ));
        return Ok(report);
    }
    if let ProblemSpec::General { h, lambda } = spec {
        let m = prefix(sol, 2.0 * ball.r);
        let (lo, hi) = sol.u()[..m]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), u| {
                (lo.min(u.ln()), hi.max(u.ln()))
            });
        let range = SRange::new(lo - HYPOTHESIS_WIDENING, hi + HYPOTHESIS_WIDENING);
        let hyp = check_system(
            h,
            *lambda,
            &Sampling::new(ball.n, ball.k, range, settings.samples),
        )?;
        let passed = hyp.passed();
        report.hypotheses = Some(hyp);
        if !passed {
            report.verdict = Verdict::NotApplicable;
            report.reason = Some("hypothesis system fails on the traversed range".into());
            return Ok(report);
        }
    }
    let margin = report.margin.expect("covering 2R covers R");
    report.verdict = verdict_for(margin, c, settings.slack);
    Ok(report)
}

/// `sup u / inf u` over `[0, R/2]` against `e^(R √C)`.
///
/// `bound` supplies `C`; the returned report carries no hypothesis check.
pub fn verify_harnack(
    sol: &RadialSolution,
    r: f64,
    bound: &BoundReport,
    settings: &VerifySettings,
) -> Result<VerificationReport, VerifyError> {
    let factor = harnack_factor(r, bound.value)?;
    let mut report = VerificationReport {
        theorem: Theorem::Harnack,
        bound: bound.clone(),
        bound_value: factor,
        statistic: None,
        at: None,
        margin: None,
        verdict: Verdict::NoVerdict,
        hypotheses: None,
        reason: None,
    };
    if !sol.covers(0.5 * r) {
        report.reason = Some(format!(
            "solution stopped at r = {} before R/2 = {}",
            sol.reached(),
            0.5 * r
        ));
        return Ok(report);
    }
    let m = prefix(sol, 0.5 * r);
    let (at, sup) = refined_max(&sol.r()[..m], &sol.u()[..m]).expect("solution has samples");
    let (_, inf) = refined_min(&sol.r()[..m], &sol.u()[..m]).expect("solution has samples");
    let ratio = sup / inf;
    report.statistic = Some(ratio);
    report.at = Some(at);
    report.margin = Some(factor - ratio);
    report.verdict = verdict_for(factor - ratio, factor, settings.slack);
    Ok(report)
}

/// Gradient check followed by the Harnack check it licenses. The Harnack
/// report inherits the gradient report's hypotheses and gating verdict.
pub fn verify_harnack_for(
    sol: &RadialSolution,
    spec: &ProblemSpec,
    ball: &Ball,
    settings: &VerifySettings,
) -> Result<(VerificationReport, VerificationReport), VerifyError> {
    if !matches!(spec, ProblemSpec::General { .. }) {
        return Err(VerifyError::HarnackNeedsGeneral);
    }
    let gradient = verify_gradient_bound(sol, spec, ball, settings)?;
    let mut harnack = verify_harnack(sol, ball.r, &gradient.bound, settings)?;
    harnack.hypotheses = gradient.hypotheses.clone();
    if matches!(
        gradient.verdict,
        Verdict::NotApplicable | Verdict::NoVerdict
    ) {
        harnack.verdict = gradient.verdict;
        harnack.reason = gradient.reason.clone();
    }
    Ok((gradient, harnack))
}

/// Solver options whose output grid on `[0, 2R]` contains `R/2` and `R`
/// and has at least `base.resample` samples on `[0, R]`.
pub fn verification_options(base: &SolverOptions) -> SolverOptions {
    let quarter = base.resample.div_ceil(2).max(1);
    SolverOptions {
        resample: 4 * quarter + 1,
        ..*base
    }
}

/// Solve on `[0, 2R]` with [`verification_options`].
pub fn solve_for_verification(
    model: &ManifoldModel,
    h: &Nonlinearity,
    u0: f64,
    r: f64,
    base: &SolverOptions,
) -> Result<RadialSolution, SolveError> {
    solve_radial(model, h, u0, 2.0 * r, &verification_options(base))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_R2")]
    pub c_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiouvilleScan {
    pub theorem: Theorem,
    pub n: usize,
    pub cutoff: CutoffConstants,
    pub variant: ConstantVariant,
    pub rows: Vec<DecayRow>,
    /// `max |C R² / (C R²)_0 - 1|` over the rows.
    pub spread: f64,
}

impl LiouvilleScan {
    pub fn is_constant(&self, rel: f64) -> bool {
        self.spread <= rel
    }
}

/// The general bound at `K = 0` over increasing radii.
pub fn liouville_scan(
    n: usize,
    cut: &CutoffConstants,
    variant: ConstantVariant,
    radii: &[f64],
) -> Result<LiouvilleScan, VerifyError> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(VerifyError::Radii);
    }
    let rows = radii
        .iter()
        .map(|&r| {
            let c = crate::bounds::bound_general(&Ball::new(n, 0.0, r)?, cut, variant)?.value;
            Ok(DecayRow {
                r,
                c,
                c_r2: c * r * r,
            })
        })
        .collect::<Result<Vec<_>, BoundError>>()?;
    let reference = rows[0].c_r2;
    let spread = rows
        .iter()
        .map(|row| (row.c_r2 / reference - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(LiouvilleScan {
        theorem: Theorem::Liouville,
        n,
        cutoff: *cut,
        variant,
        rows,
        spread,
    })
}

/// One member of a theorem sweep over general problems.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteCase {
    pub h: Nonlinearity,
    pub lambda: f64,
    pub model: ManifoldModel,
    pub u0: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub case: SuiteCase,
    pub termination: Termination,
    pub reached: f64,
    pub gradient: VerificationReport,
    pub harnack: VerificationReport,
}

/// Solve and verify one case with `K` equal to the model's Ricci bound.
pub fn run_case(
    case: &SuiteCase,
    settings: &VerifySettings,
    solver: &SolverOptions,
) -> Result<SuiteOutcome, VerifyError> {
    let sol = solve_for_verification(&case.model, &case.h, case.u0, case.r, solver)?;
    let ball = Ball::new(case.model.dimension(), case.model.ricci_bound(), case.r)?;
    let spec = ProblemSpec::general(case.h.clone(), case.lambda)?;
    let (gradient, harnack) = verify_harnack_for(&sol, &spec, &ball, settings)?;
    Ok(SuiteOutcome {
        case: case.clone(),
        termination: sol.termination(),
        reached: sol.reached(),
        gradient,
        harnack,
    })
}

/// [`run_case`] over all cases in parallel; results keep input order.
pub fn run_suite(
    cases: &[SuiteCase],
    settings: &VerifySettings,
    solver: &SolverOptions,
) -> Vec<Result<SuiteOutcome, VerifyError>> {
    cases
        .par_iter()
        .map(|case| run_case(case, settings, solver))
        .collect()
}

/// Tally of a sweep by verdict of the gradient and Harnack checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SuiteTally {
    pub runs: usize,
    pub pass: usize,
    pub fail: usize,
    pub not_applicable: usize,
    pub no_verdict: usize,
    pub errors: usize,
}

impl SuiteTally {
    pub fn add(&mut self, verdict: Verdict) {
        self.runs += 1;
        match verdict {
            Verdict::Pass => self.pass += 1,
            Verdict::Fail => self.fail += 1,
            Verdict::NotApplicable => self.not_applicable += 1,
            Verdict::NoVerdict => self.no_verdict += 1,
        }
    }
}
