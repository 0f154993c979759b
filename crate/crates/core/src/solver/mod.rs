//! Time stepping for `u_t = Δu − W′(u)/ε²` and well-prepared initial data.

mod init;
mod stepper;
mod trajectory;

pub use init::init_from_curve;
pub use stepper::{discrete_energy, simulate, step, Stepper};
pub use trajectory::Trajectory;

use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Forward Euler; needs `dt ≤ h²/4` and `dt ≤ ε²/4`.
    Explicit,
    /// Implicit 5-point diffusion, explicit reaction.
    #[default]
    SemiImplicit,
    /// Strang splitting of exact Fourier diffusion and the exact reaction flow; periodic grids only.
    SpectralSplit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    /// Upper bound on the step; the run uses the largest step that divides the horizon evenly.
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub snapshot_every: usize,
    #[serde(default)]
    pub scheme: Scheme,
    /// Also keep the steps just before and after each regular snapshot, for centred time differences.
    #[serde(default)]
    pub bracket: bool,
}

fn one() -> usize {
    1
}

impl SolverConfig {
    /// Semi-implicit run with `dt = ε²/10`, snapshot at every step.
    pub fn new(epsilon: f64, t_end: f64) -> Self {
        Self { epsilon, dt: epsilon * epsilon / 10.0, t_end, snapshot_every: 1, scheme: Scheme::SemiImplicit, bracket: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return invalid(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("dt must be positive, got {}", self.dt));
        }
        if !self.t_end.is_finite() {
            return invalid("t_end must be finite");
        }
        if self.snapshot_every == 0 {
            return invalid("snapshot_every must be at least 1");
        }
        Ok(())
    }

    /// Number of steps and the evenly dividing step size from `t0` to `t_end`.
    pub fn schedule(&self, t0: f64) -> Result<(usize, f64)> {
        let span = self.t_end - t0;
        if span < -1e-12 * (1.0 + t0.abs()) {
            return invalid(format!("t_end = {} precedes the start time {t0}", self.t_end));
        }
        if span <= 1e-12 * (1.0 + t0.abs()) {
            return Ok((0, self.dt));
        }
        let n = (span / self.dt - 1e-9).ceil().max(1.0) as usize;
        Ok((n, span / n as f64))
    }
}
