use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use aclab_core::field::{Boundary, GridSpec};
use aclab_core::geometry::Polyline;
use aclab_core::solver::{Scheme, SolverConfig};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Flat,
    Circle,
    PerturbedGraph,
    GrimReaper,
    GapProbe,
}

impl ScenarioKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Flat => "flat",
            Self::Circle => "circle",
            Self::PerturbedGraph => "perturbed-graph",
            Self::GrimReaper => "grim-reaper",
            Self::GapProbe => "gap-probe",
        }
    }
}

/// Shape parameters; each scenario reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub radius: f64,
    pub center: [f64; 2],
    /// Graph perturbation amplitude (gap probe, perturbed graph).
    pub amplitude: f64,
    pub wavenumber: f64,
    /// Random modes of the perturbed graph.
    pub modes: usize,
    /// Grim reaper scale: the curve is `λ·(−log cos(x/λ))`.
    pub lambda: f64,
    /// Evenly spaced measurement times after the initial one.
    pub measurements: usize,
    /// Final scale of the monotonicity trace; defaults per scenario.
    pub s_final: Option<f64>,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            radius: 0.5,
            center: [0.0, 0.0],
            amplitude: 0.05,
            wavenumber: 2.0 * PI,
            modes: 3,
            lambda: 1.0,
            measurements: 5,
            s_final: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: ScenarioKind,
    pub epsilon: f64,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: ScenarioParams,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if self.solver.epsilon != self.epsilon {
            return Err(HarnessError::Config(format!(
                "solver epsilon {} differs from scenario epsilon {}",
                self.solver.epsilon, self.epsilon
            )));
        }
        if self.epsilon < 2.0 * self.grid.h_max() {
            return Err(aclab_core::Error::UnderResolved { eps: self.epsilon, required: 2.0 * self.grid.h_max() }.into());
        }
        if self.solver.scheme == Scheme::SpectralSplit && self.grid.boundary != Boundary::Periodic {
            return Err(HarnessError::Config("spectral-split needs a periodic grid".into()));
        }
        let p = &self.params;
        if !(p.radius > 0.0 && p.lambda > 0.0 && p.wavenumber > 0.0) || p.measurements == 0 {
            return Err(HarnessError::Config("radius, lambda, wavenumber and measurements must be positive".into()));
        }
        Ok(())
    }

    /// Default layout of each scenario at a given `ε`, spacing `ε/4`.
    pub fn preset(kind: ScenarioKind, eps: f64) -> Result<Self> {
        let params = ScenarioParams::default();
        let h = eps / 4.0;
        let k = params.wavenumber;
        let (lo, hi, boundary, scheme, t_end) = match kind {
            ScenarioKind::Flat => ([-4.0, -1.0], [4.0, 1.0], Boundary::Dirichlet, Scheme::SemiImplicit, 1.0),
            ScenarioKind::Circle => ([-1.0, -1.0], [1.0, 1.0], Boundary::Periodic, Scheme::SpectralSplit, 0.05),
            ScenarioKind::PerturbedGraph | ScenarioKind::GapProbe => {
                ([0.0, -0.5], [1.0, 0.5], Boundary::Dirichlet, Scheme::SemiImplicit, 2.0 / (k * k))
            }
            ScenarioKind::GrimReaper => ([-2.2, -0.3], [2.2, 3.0], Boundary::Dirichlet, Scheme::SemiImplicit, 0.4),
        };
        let grid = GridSpec::with_spacing(h, lo, hi, boundary)?;
        let mut solver = SolverConfig::new(eps, t_end);
        solver.scheme = scheme;
        solver.bracket = true;
        if kind == ScenarioKind::PerturbedGraph {
            solver.t_end = 1.0 / (k * k);
        }
        let mut cfg = Self { name: kind, epsilon: eps, grid, solver, seed: 0, params };
        cfg.align_schedule();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same scenario at another `ε`: spacing and step bound scale as `ε` and `ε²`.
    pub fn refined(&self, eps: f64) -> Result<Self> {
        let r = eps / self.epsilon;
        let g = &self.grid;
        let grid = GridSpec::with_spacing(g.h_max() * r, [g.x0, g.y0], [g.x1, g.y1], g.boundary)?;
        let mut solver = self.solver.clone();
        solver.epsilon = eps;
        solver.dt = self.solver.dt * r * r;
        let mut cfg = Self { epsilon: eps, grid, solver, ..self.clone() };
        cfg.align_schedule();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Shrinks `dt` so the run has a multiple of `measurements` steps and
    /// snapshots land exactly on the measurement times.
    pub fn align_schedule(&mut self) {
        let m = self.params.measurements.max(1);
        let span = self.solver.t_end;
        if span <= 0.0 {
            return;
        }
        let per = (span / (self.solver.dt * m as f64) - 1e-9).ceil().max(1.0) as usize;
        self.solver.dt = span / (per * m) as f64;
        self.solver.snapshot_every = per;
    }

    /// The initial interface, oriented with `u < 0` on its left.
    pub fn initial_curve(&self) -> Result<Polyline> {
        let p = &self.params;
        let g = &self.grid;
        let h = g.h_max();
        let pad = 0.2 * (g.x1 - g.x0);
        let (xa, xb) = (g.x1 + pad, g.x0 - pad);
        let n = ((xa - xb) / (0.5 * h)).ceil() as usize;
        let graph = |f: &dyn Fn(f64) -> f64| -> Result<Polyline> {
            let v = (0..=n).map(|i| xa + (xb - xa) * i as f64 / n as f64).map(|x| [x, f(x)]).collect();
            Ok(Polyline::new(v, false)?)
        };
        match self.name {
            ScenarioKind::Flat => graph(&|_| 0.0),
            ScenarioKind::Circle => {
                let m = ((2.0 * PI * p.radius / (0.5 * h)).ceil() as usize).max(256);
                Ok(Polyline::circle(p.center, p.radius, m)?)
            }
            ScenarioKind::GapProbe => graph(&|x| p.amplitude * (p.wavenumber * x).sin()),
            ScenarioKind::PerturbedGraph => {
                let modes = perturbation_modes(self.seed, p.modes, p.amplitude, p.wavenumber);
                graph(&move |x| modes.iter().map(|(a, k, ph)| a * (k * x + ph).sin()).sum())
            }
            ScenarioKind::GrimReaper => grim_reaper_curve(p.lambda, g.y1 + 1.0, 0.5 * h),
        }
    }
}

/// `(amplitude, wavenumber, phase)` of the seeded perturbation: mode `m` has
/// amplitude `a/m` and wavenumber `m·k`.
pub fn perturbation_modes(seed: u64, modes: usize, a: f64, k: f64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=modes).map(|m| (a / m as f64, m as f64 * k, rng.gen_range(0.0..2.0 * PI))).collect()
}

/// `y = λ·(−log cos(x/λ))` continued by vertical tails up to `y_top`,
/// traversed from the right tail down and up the left one, resampled at
/// spacing at most `ds`. The tails join the curve at height `y_top − λ`.
pub fn grim_reaper_curve(lambda: f64, y_top: f64, ds: f64) -> Result<Polyline> {
    let y_end = (y_top - lambda).min(-lambda * 1e-6f64.sin().ln());
    let y_mid = lambda * 2f64.sqrt().ln();
    if !(y_end > y_mid) {
        return Err(HarnessError::Config(format!("grim reaper window top {y_top} is too low for lambda = {lambda}")));
    }
    // Steep flanks are sampled uniformly in height, the cap uniformly in angle.
    let x_of = |y: f64| lambda * (-y / lambda).exp().acos();
    let nf = ((y_end - y_mid) / (0.5 * ds)).ceil() as usize;
    let nc = ((FRAC_PI_2 * lambda) / (0.5 * ds)).ceil() as usize;
    let mut right = vec![[x_of(y_end), y_top]];
    right.extend((0..nf).map(|i| {
        let y = y_end - (y_end - y_mid) * i as f64 / nf as f64;
        [x_of(y), y]
    }));
    let mut dense = right.clone();
    dense.extend((0..=nc).map(|i| {
        let th = PI / 4.0 - FRAC_PI_2 * i as f64 / nc as f64;
        [lambda * th, -lambda * th.cos().ln()]
    }));
    dense.extend(right.iter().rev().map(|p| [-p[0], p[1]]));
    Ok(Polyline::new(resample_linear(&dense, ds), false)?)
}

/// Vertices at arclength spacing at most `ds` along the open chain `pts`, keeping its corners.
pub fn resample_linear(pts: &[[f64; 2]], ds: f64) -> Vec<[f64; 2]> {
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let l = (b[0] - a[0]).hypot(b[1] - a[1]);
        let k = (l / ds).ceil().max(1.0) as usize;
        for i in 1..=k {
            let t = i as f64 / k as f64;
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_align() {
        for kind in [ScenarioKind::Flat, ScenarioKind::Circle, ScenarioKind::GapProbe, ScenarioKind::GrimReaper, ScenarioKind::PerturbedGraph] {
            let c = ScenarioConfig::preset(kind, 0.08).unwrap();
            let (n, dt) = c.solver.schedule(0.0).unwrap();
            assert_eq!(n, c.solver.snapshot_every * c.params.measurements, "{kind:?}");
            assert!((dt - c.solver.dt).abs() < 1e-15);
            c.initial_curve().unwrap();
        }
    }

    #[test]
    fn circle_grid_refines_with_eps() {
        let c = ScenarioConfig::preset(ScenarioKind::Circle, 0.08).unwrap();
        assert_eq!(c.grid.nx, 100);
        let f = c.refined(0.02).unwrap();
        assert_eq!((f.grid.nx, f.grid.ny), (400, 400));
        assert!(f.grid.h_max() <= 0.02 / 4.0 + 1e-15);
        assert!(f.solver.dt <= 0.02f64.powi(2) / 10.0 * (1.0 + 1e-12));
    }

    #[test]
    fn json_roundtrip() {
        let c = ScenarioConfig::preset(ScenarioKind::GapProbe, 0.04).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn under_resolution_rejected() {
        let mut c = ScenarioConfig::preset(ScenarioKind::Circle, 0.08).unwrap();
        c.grid = GridSpec::new(20, 20, [-1.0, -1.0], [1.0, 1.0], Boundary::Periodic).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn seeded_phases_repeat() {
        assert_eq!(perturbation_modes(7, 3, 0.05, 6.0), perturbation_modes(7, 3, 0.05, 6.0));
        assert_ne!(perturbation_modes(7, 3, 0.05, 6.0), perturbation_modes(8, 3, 0.05, 6.0));
    }

    #[test]
    fn grim_reaper_curve_shape() {
        let c = grim_reaper_curve(1.0, 5.0, 0.01).unwrap();
        let v = c.vertices();
        assert_eq!(v[0][1], 5.0);
        assert_eq!(v[v.len() - 1][1], 5.0);
        let tip = v.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        assert!(tip.abs() < 1e-5, "{tip}");
        assert!(c.segment_lengths().iter().all(|l| *l <= 0.01 + 1e-12));
    }
}
