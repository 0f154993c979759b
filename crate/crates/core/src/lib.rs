//! Allen–Cahn phase-field laboratory.
//!
//! Simulates `u_t = Δu − W′(u)/ε²` on uniform grids and measures the geometry
//! of the nodal set `{u = 0}` against exact curve shortening flow.
//!
//! Sign conventions used throughout:
//! * polylines are oriented with `u < 0` on their left;
//! * curvature is positive when the curve bends toward its left normal, so a
//!   counterclockwise circle of radius `r` has `κ = 1/r`;
//! * signed distance and Fermi offsets `z` are positive on the right (`u > 0`);
//! * normal velocity is measured along the left normal, so a shrinking
//!   counterclockwise circle moves with `v = +1/r` and curve shortening flow
//!   reads `v = κ`.

pub mod approximation;
pub mod csf;
pub mod diagnostics;
mod error;
pub mod field;
pub mod geometry;
pub mod numerics;
pub mod profile;
pub mod solver;

pub use error::{Error, Result};

/// Derivative order selector shared by the potential and the profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Value,
    First,
    Second,
}
