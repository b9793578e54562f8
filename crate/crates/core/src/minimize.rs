//! One-dimensional minimization on an open interval `(0, width)`.
//!
//! The objectives of [`crate::bounds`] blow up at both ends of their
//! interval and have a single interior minimum. A coarse uniform scan
//! brackets the minimum, golden-section search refines it, and an optional
//! sign-bisection on a stationarity function pins the minimizer below the
//! `sqrt(eps)` resolution that comparisons of function values allow.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCAN_POINTS: usize = 1024;
pub const GOLDEN_REL_TOL: f64 = 1e-12;
const GOLDEN_MAX_ITER: usize = 200;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorMinimum {
    pub x: f64,
    pub value: f64,
    /// Objective at the scan points on either side of the coarse minimum;
    /// `None` where that side is the open end of the interval.
    pub scan_neighbors: [Option<f64>; 2],
    /// Bracket handed to golden-section search.
    #[serde(skip)]
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinimizeError {
    #[error("interval width {0} must be finite and positive")]
    Width(f64),
    #[error("objective is not finite anywhere on the scan grid")]
    NonFinite,
}

/// Minimize `f` over `(0, width)`.
pub fn minimize_open_interval(
    f: impl Fn(f64) -> f64,
    width: f64,
) -> Result<InteriorMinimum, MinimizeError> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(MinimizeError::Width(width));
    }
    let grid = |i: usize| width * (i + 1) as f64 / (SCAN_POINTS + 1) as f64;
    let values: Vec<f64> = (0..SCAN_POINTS).map(|i| f(grid(i))).collect();
    let best = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or(MinimizeError::NonFinite)?;

    let lo = if best == 0 { 0.0 } else { grid(best - 1) };
    let hi = if best + 1 == SCAN_POINTS {
        width
    } else {
        grid(best + 1)
    };
    let neighbors = [
        best.checked_sub(1).map(|i| values[i]),
        (best + 1 < SCAN_POINTS).then(|| values[best + 1]),
    ];

    let (x, value) = golden_section(&f, lo, hi, (grid(best), values[best]));
    Ok(InteriorMinimum {
        x,
        value,
        scan_neighbors: neighbors,
        bracket: (lo, hi),
    })
}

/// Golden-section search on `[a, b]`; `fallback` is a known point that the
/// result never does worse than.
fn golden_section(
    f: &impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    fallback: (f64, f64),
) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_MAX_ITER {
        let mid = 0.5 * (a + b);
        if (b - a) <= GOLDEN_REL_TOL * mid.abs() {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if best.1.is_finite() && best.1 <= fallback.1 {
        best
    } else {
        fallback
    }
}

/// Root of a stationarity function that is negative at `lo` and positive at
/// `hi`, bisected until the bracket cannot shrink further.
pub fn bisect_stationary(slope: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    if !(slope(lo) < 0.0 && slope(hi) > 0.0) {
        return None;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Some(mid);
        }
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = minimize_open_interval(|x| (x - 0.3).powi(2) + 1.0, 1.0).unwrap();
        assert!((m.x - 0.3).abs() < 1e-7);
        assert_eq!(m.value, 1.0 + (m.x - 0.3).powi(2));
        assert!(m.scan_neighbors.iter().all(|v| v.unwrap() > m.value));
    }

    #[test]
    fn rational_with_blow_up() {
        // (3 + 1/t)/(1 - t) on (0, 1): minimum 9 at t = 1/3
        let m = minimize_open_interval(|t| (3.0 + 1.0 / t) / (1.0 - t), 1.0).unwrap();
        assert!((m.value - 9.0).abs() < 1e-13);
        assert!((m.x - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn minimum_at_edge_of_scan() {
        let m = minimize_open_interval(|x| x, 1.0).unwrap();
        assert!(m.scan_neighbors[0].is_none());
        assert!(m.x < 1.0 / SCAN_POINTS as f64);
    }

    #[test]
    fn errors() {
        assert_eq!(
            minimize_open_interval(|x| x, 0.0),
            Err(MinimizeError::Width(0.0))
        );
        assert_eq!(
            minimize_open_interval(|_| f64::NAN, 1.0),
            Err(MinimizeError::NonFinite)
        );
    }

    #[test]
    fn bisection_to_full_precision() {
        let root = bisect_stationary(|t| 3.0 * t - 1.0, 0.0, 1.0).unwrap();
        assert!((root - 1.0 / 3.0).abs() <= f64::EPSILON);
        assert_eq!(bisect_stationary(|t| t, 0.5, 1.0), None);
    }
}
