//! Verification toolkit for gradient estimates of positive solutions to
//! `Δu + u·h(ln u) = 0` on manifolds with Ricci curvature bounded below.
//!
//! - [`hexpr`]: the expression language for `h`, with symbolic derivatives.
//! - [`conditions`]: sampled checks of the hypothesis systems on `h`.
//! - [`bounds`]: the explicit gradient-bound constants and the Harnack factor.
//! - [`geometry`]: Euclidean and hyperbolic model spaces.
//! - [`solver`]: radial shooting solutions on geodesic balls.
//! - [`verify`]: assembling the bounded quantities along solutions.

pub mod bounds;
pub mod conditions;
pub mod geometry;
pub mod hexpr;
pub mod minimize;
pub mod solver;
pub mod verify;
