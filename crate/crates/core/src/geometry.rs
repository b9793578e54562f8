//! Constant-curvature model spaces.
//!
//! A model of dimension `n` and sectional curvature `κ <= 0` has metric
//! `dr² + f(r)² g_sphere`, with `f(r) = r` (flat) or
//! `f(r) = sinh(√|κ| r)/√|κ|` (hyperbolic). Its Ricci curvature is exactly
//! `-(n-1)|κ| g`, so it realizes `Ric >= -K g` with equality for
//! `K = (n-1)|κ|`. For radial `u`, `Δu = u'' + drift(r) u'`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldModel {
    n: usize,
    kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension n = {0} must be at least 2")]
    Dimension(usize),
    #[error("sectional curvature kappa = {0} must be finite and <= 0")]
    Curvature(f64),
    #[error("radius r = {0} must be positive")]
    Radius(f64),
}

impl ManifoldModel {
    pub fn new(n: usize, kappa: f64) -> Result<Self, GeometryError> {
        if n < 2 {
            return Err(GeometryError::Dimension(n));
        }
        if !(kappa <= 0.0 && kappa.is_finite()) {
            return Err(GeometryError::Curvature(kappa));
        }
        Ok(ManifoldModel {
            n,
            kappa: if kappa == 0.0 { 0.0 } else { kappa },
        })
    }

    pub fn euclidean(n: usize) -> Result<Self, GeometryError> {
        Self::new(n, 0.0)
    }

    pub fn hyperbolic(n: usize, kappa: f64) -> Result<Self, GeometryError> {
        Self::new(n, kappa)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn is_flat(&self) -> bool {
        self.kappa == 0.0
    }

    /// The Ricci lower-bound constant `K = (n-1)|κ|`.
    pub fn ricci_bound(&self) -> f64 {
        (self.n - 1) as f64 * self.kappa.abs()
    }

    /// Warp function `f(r)`.
    pub fn warp(&self, r: f64) -> f64 {
        if self.is_flat() {
            r
        } else {
            let a = self.kappa.abs().sqrt();
            (a * r).sinh() / a
        }
    }

    /// `(n-1) f'(r)/f(r)`.
    pub fn drift(&self, r: f64) -> Result<f64, GeometryError> {
        if !(r > 0.0) {
            return Err(GeometryError::Radius(r));
        }
        let m = (self.n - 1) as f64;
        Ok(if self.is_flat() {
            m / r
        } else {
            let a = self.kappa.abs().sqrt();
            m * a * coth(a * r)
        })
    }
}

/// `coth x = 1 + 2/(e^{2x} - 1)` for `x > 0`, without cancellation near 0.
fn coth(x: f64) -> f64 {
    1.0 + 2.0 / (2.0 * x).exp_m1()
}
