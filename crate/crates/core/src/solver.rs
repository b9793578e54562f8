//! Radial solutions of `Δu + u h(ln u) = 0` on model spaces.
//!
//! The radial equation `u'' + drift(r) u' + u h(ln u) = 0` is singular at
//! the pole, so integration starts at `ε = 1e-6 R_max` from the series
//!
//! ```text
//! u(ε)  = u0 - u0 h(ln u0) ε² / (2n)
//! u'(ε) = -u0 h(ln u0) ε / n
//! ```
//!
//! and proceeds with the Dormand–Prince 5(4) pair under PI step control.
//! The 4th-order continuous extension resamples the solution onto a
//! uniform grid on `[0, R_max]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::ManifoldModel;
use crate::hexpr::{EvalError, Nonlinearity};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_FLOOR_RATIO: f64 = 1e-8;
pub const DEFAULT_RESAMPLE: usize = 2048;
const START_FRACTION: f64 = 1e-6;
const MAX_STEPS: usize = 2_000_000;

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller (Hairer–Wanner defaults).
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;

type State = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Local absolute and relative tolerance of the embedded error estimate.
    pub tol: f64,
    /// Integration stops once `u <= floor_ratio · u0`.
    pub floor_ratio: f64,
    /// Number of uniform output samples on `[0, R_max]`.
    pub resample: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            floor_ratio: DEFAULT_FLOOR_RATIO,
            resample: DEFAULT_RESAMPLE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ReachedRmax,
    HitFloor,
    StepFailure,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("initial value u0 = {0} must be finite and positive")]
    InitialValue(f64),
    #[error("R_max = {0} must be finite and positive")]
    Radius(f64),
    #[error("invalid solver options: {0}")]
    Options(&'static str),
    #[error("h undefined at r = {r}, ln u = {ln_u}")]
    Domain {
        r: f64,
        ln_u: f64,
        source: EvalError,
    },
}

/// A sampled positive radial solution on `[0, reached]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    model: ManifoldModel,
    h: Nonlinearity,
    u0: f64,
    r_max: f64,
    options: SolverOptions,
    termination: Termination,
    /// Last radius the integrator reached with a positive solution.
    reached: f64,
    r: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
}

impl RadialSolution {
    pub fn model(&self) -> &ManifoldModel {
        &self.model
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.h
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn reached(&self) -> f64 {
        self.reached
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn du(&self) -> &[f64] {
        &self.du
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Whether the solution covers `[0, radius]`.
    pub fn covers(&self, radius: f64) -> bool {
        let eps = 1e-12 * self.r_max;
        self.termination == Termination::ReachedRmax && radius <= self.r_max + eps
            || self.reached + eps >= radius
    }

    /// `|u'|/u` at every sample; equals `|∇ ln u|` for radial functions.
    pub fn log_gradient(&self) -> Vec<f64> {
        self.du
            .iter()
            .zip(&self.u)
            .map(|(du, u)| du.abs() / u)
            .collect()
    }

    /// Range of `ln u` over the samples.
    pub fn log_range(&self) -> (f64, f64) {
        self.u
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), u| {
                let s = u.ln();
                (lo.min(s), hi.max(s))
            })
    }

    /// Max-norm of `u'' + drift u' + u h(ln u)` over interior samples, with
    /// `u''` from a five-point stencil on the sampled `u'`.
    pub fn residual(&self) -> Result<f64, EvalError> {
        let n = self.r.len();
        if n < 5 {
            return Ok(0.0);
        }
        let dr = self.r[1] - self.r[0];
        let mut worst: f64 = 0.0;
        for i in 2..n - 2 {
            let d2u = (-self.du[i + 2] + 8.0 * self.du[i + 1] - 8.0 * self.du[i - 1]
                + self.du[i - 2])
                / (12.0 * dr);
            let drift = self
                .model
                .drift(self.r[i])
                .expect("interior radius is positive");
            let res = d2u + drift * self.du[i] + self.u[i] * self.h.value(self.u[i].ln())?;
            worst = worst.max(res.abs());
        }
        Ok(worst)
    }
}

struct Rhs<'a> {
    model: &'a ManifoldModel,
    h: &'a Nonlinearity,
}

enum RhsError {
    /// A trial stage left the positive cone; the step is retried smaller.
    NonPositive,
    Domain(SolveError),
}

impl Rhs<'_> {
    fn eval(&self, r: f64, [u, v]: State) -> Result<State, RhsError> {
        if !(u > 0.0) || !v.is_finite() {
            return Err(RhsError::NonPositive);
        }
        let ln_u = u.ln();
        let h = self
            .h
            .value(ln_u)
            .map_err(|source| RhsError::Domain(SolveError::Domain { r, ln_u, source }))?;
        let drift = self.model.drift(r).expect("integration radius is positive");
        Ok([v, -drift * v - u * h])
    }
}

fn axpy(y: State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

struct Step {
    y_new: State,
    k7: State,
    err: f64,
    cont: [State; 5],
}

fn dopri_step(rhs: &Rhs, r: f64, y: State, k1: State, h: f64, tol: f64) -> Result<Step, RhsError> {
    let k2 = rhs.eval(r + C2 * h, axpy(y, h, &[(A21, &k1)]))?;
    let k3 = rhs.eval(r + C3 * h, axpy(y, h, &[(A31, &k1), (A32, &k2)]))?;
    let k4 = rhs.eval(
        r + C4 * h,
        axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
    )?;
    let k5 = rhs.eval(
        r + C5 * h,
        axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    )?;
    let k6 = rhs.eval(
        r + h,
        axpy(
            y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    )?;
    let y_new = axpy(
        y,
        h,
        &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    let k7 = rhs.eval(r + h, y_new)?;

    let mut sum = 0.0;
    for i in 0..2 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let scale = tol + tol * y[i].abs().max(y_new[i].abs());
        sum += (e / scale).powi(2);
    }
    let err = (sum / 2.0).sqrt();

    let mut cont = [[0.0; 2]; 5];
    for i in 0..2 {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k7[i] - bspl;
        cont[4][i] =
            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Ok(Step {
        y_new,
        k7,
        err,
        cont,
    })
}

fn dense(cont: &[State; 5], theta: f64) -> State {
    let t1 = 1.0 - theta;
    let mut out = [0.0; 2];
    for i in 0..2 {
        out[i] = cont[0][i]
            + theta * (cont[1][i] + t1 * (cont[2][i] + theta * (cont[3][i] + t1 * cont[4][i])));
    }
    out
}

/// Shoot from the pole with `u(0) = u0`, `u'(0) = 0` out to `r_max`.
pub fn solve_radial(
    model: &ManifoldModel,
    h: &Nonlinearity,
    u0: f64,
    r_max: f64,
    options: &SolverOptions,
) -> Result<RadialSolution, SolveError> {
    if !(u0 > 0.0 && u0.is_finite()) {
        return Err(SolveError::InitialValue(u0));
    }
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(SolveError::Radius(r_max));
    }
    if !(options.tol > 0.0) {
        return Err(SolveError::Options("tol must be positive"));
    }
    if !(options.floor_ratio > 0.0 && options.floor_ratio < 1.0) {
        return Err(SolveError::Options("floor ratio must lie in (0, 1)"));
    }
    if options.resample < 2 {
        return Err(SolveError::Options("resample size must be at least 2"));
    }

    let rhs = Rhs { model, h };
    let n = model.dimension() as f64;
    let ln_u0 = u0.ln();
    let h0 = h.value(ln_u0).map_err(|source| SolveError::Domain {
        r: 0.0,
        ln_u: ln_u0,
        source,
    })?;
    let floor = options.floor_ratio * u0;
    let forcing = u0 * h0;
    let series = |r: f64| -> State { [u0 - forcing * r * r / (2.0 * n), -forcing * r / n] };

    let grid_step = r_max / (options.resample - 1) as f64;
    let grid = |i: usize| {
        if i + 1 == options.resample {
            r_max
        } else {
            i as f64 * grid_step
        }
    };

    let mut out_r = vec![0.0];
    let mut out_u = vec![u0];
    let mut out_du = vec![0.0];
    let mut next = 1;

    let eps = START_FRACTION * r_max;
    while next < options.resample && grid(next) <= eps {
        let [u, du] = series(grid(next));
        out_r.push(grid(next));
        out_u.push(u);
        out_du.push(du);
        next += 1;
    }

    let mut r = eps;
    let mut y = series(eps);
    let mut k1 = match rhs.eval(r, y) {
        Ok(k) => k,
        Err(RhsError::Domain(e)) => return Err(e),
        Err(RhsError::NonPositive) => return Err(SolveError::InitialValue(u0)),
    };
    let mut step = (1e-3 * r_max).min(r_max - r);
    let min_step = 1e-14 * r_max;
    let mut fac_old: f64 = 1e-4;
    let mut termination = Termination::ReachedRmax;
    let mut reached = r;
    let mut steps = 0;

    'integrate: while r < r_max {
        steps += 1;
        if steps > MAX_STEPS || step < min_step {
            termination = Termination::StepFailure;
            break;
        }
        let last = r + step >= r_max;
        let h_try = if last { r_max - r } else { step };
        let trial = match dopri_step(&rhs, r, y, k1, h_try, options.tol) {
            Ok(t) => t,
            Err(RhsError::Domain(e)) => return Err(e),
            Err(RhsError::NonPositive) => {
                step = h_try * FAC_MIN;
                continue;
            }
        };

        let fac11 = trial.err.powf(EXPO);
        if trial.err <= 1.0 {
            let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            fac_old = trial.err.max(1e-4);
            let r_new = if last { r_max } else { r + h_try };

            while next < options.resample && grid(next) <= r_new {
                let theta = ((grid(next) - r) / h_try).clamp(0.0, 1.0);
                let [u, du] = dense(&trial.cont, theta);
                if !(u > floor) {
                    termination = Termination::HitFloor;
                    break 'integrate;
                }
                out_r.push(grid(next));
                out_u.push(u);
                out_du.push(du);
                next += 1;
            }

            r = r_new;
            y = trial.y_new;
            k1 = trial.k7;
            reached = r;
            if !(y[0] > floor) {
                termination = Termination::HitFloor;
                break;
            }
            step = h_try / fac;
        } else {
            step = h_try / (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }

    Ok(RadialSolution {
        model: *model,
        h: h.clone(),
        u0,
        r_max,
        options: *options,
        termination,
        reached: if termination == Termination::ReachedRmax {
            r_max
        } else {
            reached
        },
        r: out_r,
        u: out_u,
        du: out_du,
    })
}
