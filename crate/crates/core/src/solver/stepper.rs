use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::{Scheme, SolverConfig, Trajectory};
use crate::field::{fd_laplacian, kahan_sum, w, w1, Boundary, Dst2, GridSpec, ScalarField, SpectralPlan};
use crate::error::invalid;
use crate::{Error, Result};

const DIVERGENCE_BOUND: f64 = 2.0;

enum Backend {
    Explicit,
    Fourier { plan: SpectralPlan, denom: Vec<f64> },
    Sine { dst: Dst2, denom: Vec<f64> },
    Split { plan: SpectralPlan, decay: Vec<f64> },
}

/// A configured single-step map on a fixed grid.
pub struct Stepper {
    grid: GridSpec,
    eps: f64,
    dt: f64,
    scheme: Scheme,
    backend: Backend,
}

impl Stepper {
    /// `dt` is the step actually taken (see [`SolverConfig::schedule`]).
    pub fn new(grid: GridSpec, cfg: &SolverConfig, dt: f64) -> Result<Self> {
        cfg.validate()?;
        let eps = cfg.epsilon;
        let (hx, hy) = (grid.hx(), grid.hy());
        let backend = match (cfg.scheme, grid.boundary) {
            (Scheme::Explicit, _) => {
                let hmin = hx.min(hy);
                if dt > hmin * hmin / 4.0 * (1.0 + 1e-12) {
                    return invalid(format!("explicit scheme needs dt <= min(hx,hy)^2/4 = {}, got {dt}", hmin * hmin / 4.0));
                }
                if dt > eps * eps / 4.0 * (1.0 + 1e-12) {
                    return invalid(format!("explicit scheme needs dt <= eps^2/4 = {}, got {dt}", eps * eps / 4.0));
                }
                Backend::Explicit
            }
            (Scheme::SemiImplicit, Boundary::Periodic) => {
                let plan = SpectralPlan::new(&grid)?;
                let mut denom = Vec::with_capacity(grid.len());
                for j in 0..grid.ny {
                    let sy = (plan.ky()[j] * hy / 2.0).sin();
                    for i in 0..grid.nx {
                        let sx = (plan.kx()[i] * hx / 2.0).sin();
                        let lam = -4.0 * sx * sx / (hx * hx) - 4.0 * sy * sy / (hy * hy);
                        denom.push(1.0 - dt * lam);
                    }
                }
                Backend::Fourier { plan, denom }
            }
            (Scheme::SemiImplicit, Boundary::Dirichlet) => {
                let dst = Dst2::new(grid.nx - 2, grid.ny - 2);
                let denom = dst.laplacian_eigenvalues(hx, hy).iter().map(|l| 1.0 - dt * l).collect();
                Backend::Sine { dst, denom }
            }
            (Scheme::SpectralSplit, Boundary::Periodic) => {
                let plan = SpectralPlan::new(&grid)?;
                let mut decay = Vec::with_capacity(grid.len());
                for ky in plan.ky() {
                    for kx in plan.kx() {
                        decay.push((-dt * (kx * kx + ky * ky)).exp());
                    }
                }
                Backend::Split { plan, decay }
            }
            (Scheme::SpectralSplit, Boundary::Dirichlet) => {
                return invalid("spectral-split needs a periodic grid");
            }
        };
        Ok(Self { grid, eps, dt, scheme: cfg.scheme, backend })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn reaction_flow(&self, v: &mut [f64], tau: f64) {
        let e = (-2.0 * tau / (self.eps * self.eps)).exp();
        v.par_iter_mut().for_each(|u| {
            let u2 = *u * *u;
            *u /= (u2 + (1.0 - u2) * e).sqrt();
        });
    }

    fn explicit_rhs(&self, u: &ScalarField) -> Vec<f64> {
        let (dt, e2) = (self.dt, self.eps * self.eps);
        u.values().par_iter().map(|&v| v - dt * w1(v) / e2).collect()
    }

    pub fn step(&self, u: &ScalarField) -> Result<ScalarField> {
        if u.grid() != &self.grid {
            return Err(Error::InvalidGrid("field grid differs from the stepper grid".into()));
        }
        let g = &self.grid;
        let t = u.time() + self.dt;
        let mut next = match &self.backend {
            Backend::Explicit => {
                let lap = fd_laplacian(u);
                let mut v = self.explicit_rhs(u);
                v.par_iter_mut().zip(lap.values().par_iter()).for_each(|(a, l)| *a += self.dt * l);
                v
            }
            Backend::Fourier { plan, denom } => {
                let s = plan.forward(&self.explicit_rhs(u));
                plan.apply_symbol(&s, |i, j| Complex64::new(1.0 / denom[j * g.nx + i], 0.0))
            }
            Backend::Sine { dst, denom } => self.sine_solve(u, dst, denom),
            Backend::Split { plan, decay } => {
                let mut v = u.values().to_vec();
                self.reaction_flow(&mut v, 0.5 * self.dt);
                let s = plan.forward(&v);
                let mut v = plan.apply_symbol(&s, |i, j| Complex64::new(decay[j * g.nx + i], 0.0));
                self.reaction_flow(&mut v, 0.5 * self.dt);
                v
            }
        };
        if g.boundary == Boundary::Dirichlet {
            hold_boundary(g, u.values(), &mut next);
        }
        let peak = next.iter().fold(0.0f64, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v.abs()) });
        if peak > DIVERGENCE_BOUND {
            return Err(Error::Diverged { time: t, bound: self.bound_message() });
        }
        Ok(ScalarField::from_parts(*g, next, t))
    }

    fn bound_message(&self) -> String {
        let e2 = self.eps * self.eps;
        match self.scheme {
            Scheme::Explicit => {
                let h = self.grid.hx().min(self.grid.hy());
                format!("explicit CFL dt <= min(h^2/4, eps^2/4) = {} (dt = {})", (h * h / 4.0).min(e2 / 4.0), self.dt)
            }
            _ => format!("reaction stiffness dt <= eps^2 = {e2} (dt = {})", self.dt),
        }
    }

    /// `(I − dt Δ_h) v = rhs` on the interior with the boundary samples moved to the right-hand side.
    fn sine_solve(&self, u: &ScalarField, dst: &Dst2, denom: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let (nx, ny) = (g.nx, g.ny);
        let (mx, my) = (nx - 2, ny - 2);
        let (cx, cy) = (self.dt / (g.hx() * g.hx()), self.dt / (g.hy() * g.hy()));
        let rhs = self.explicit_rhs(u);
        let uv = u.values();
        let mut b: Vec<f64> = (0..mx * my)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k % mx + 1, k / mx + 1);
                let mut r = rhs[g.idx(i, j)];
                if i == 1 {
                    r += cx * uv[g.idx(0, j)];
                }
                if i == nx - 2 {
                    r += cx * uv[g.idx(nx - 1, j)];
                }
                if j == 1 {
                    r += cy * uv[g.idx(i, 0)];
                }
                if j == ny - 2 {
                    r += cy * uv[g.idx(i, ny - 1)];
                }
                r
            })
            .collect();
        dst.transform(&mut b);
        let scale = dst.inverse_scale();
        b.par_iter_mut().zip(denom.par_iter()).for_each(|(v, d)| *v *= scale / d);
        dst.transform(&mut b);
        let mut out = uv.to_vec();
        for j in 0..my {
            let row = &b[j * mx..(j + 1) * mx];
            let start = g.idx(1, j + 1);
            out[start..start + mx].copy_from_slice(row);
        }
        out
    }
}

fn hold_boundary(g: &GridSpec, old: &[f64], new: &mut [f64]) {
    for i in 0..g.nx {
        for j in [0, g.ny - 1] {
            new[g.idx(i, j)] = old[g.idx(i, j)];
        }
    }
    for j in 0..g.ny {
        for i in [0, g.nx - 1] {
            new[g.idx(i, j)] = old[g.idx(i, j)];
        }
    }
}

/// One step of size `cfg.dt`.
pub fn step(u: &ScalarField, cfg: &SolverConfig) -> Result<ScalarField> {
    Stepper::new(*u.grid(), cfg, cfg.dt)?.step(u)
}

/// Runs from `u0.time()` to `cfg.t_end`, keeping the initial state, every
/// `snapshot_every`-th step (plus neighbours when bracketing) and the final state.
pub fn simulate(u0: &ScalarField, cfg: &SolverConfig) -> Result<Trajectory> {
    let t0 = u0.time();
    let (n, dt) = cfg.schedule(t0)?;
    let stepper = Stepper::new(*u0.grid(), cfg, dt)?;
    let keep = |k: usize| {
        let e = cfg.snapshot_every;
        k == 0 || k == n || k % e == 0 || (cfg.bracket && ((k + 1) % e == 0 || (k - 1) % e == 0))
    };
    let mut snaps = vec![u0.clone()];
    let mut steps = vec![0];
    let mut u = u0.clone();
    for k in 1..=n {
        u = stepper.step(&u)?.with_time(t0 + k as f64 * dt);
        if keep(k) {
            snaps.push(u.clone());
            steps.push(k);
        }
    }
    let traj = Trajectory::with_steps(cfg.clone(), snaps, steps)?;
    if let Some(te) = traj.extinction_time() {
        log::info!("nodal set extinct by t = {te}");
    }
    Ok(traj)
}

/// `Σ [ε|D⁺u|²/2 + W(u)/ε]·hx·hy` with forward differences (periodic wrap, or
/// edges between samples on a clamped grid).
pub fn discrete_energy(u: &ScalarField, eps: f64) -> f64 {
    let g = u.grid();
    let v = u.values();
    let (hx, hy) = (g.hx(), g.hy());
    let periodic = g.boundary == Boundary::Periodic;
    let terms: Vec<f64> = (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % g.nx, k / g.nx);
            let mut grad = 0.0;
            if periodic || i + 1 < g.nx {
                let d = (v[g.idx((i + 1) % g.nx, j)] - v[k]) / hx;
                grad += d * d;
            }
            if periodic || j + 1 < g.ny {
                let d = (v[g.idx(i, (j + 1) % g.ny)] - v[k]) / hy;
                grad += d * d;
            }
            0.5 * eps * grad + w(v[k]) / eps
        })
        .collect();
    kahan_sum(&terms) * hx * hy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fd_laplacian;
    use crate::profile::CutoffProfile;

    fn periodic(n: usize, l: f64) -> GridSpec {
        GridSpec::new(n, n, [-l, -l], [l, l], Boundary::Periodic).unwrap()
    }

    #[test]
    fn wells_are_stationary() {
        for scheme in [Scheme::Explicit, Scheme::SemiImplicit, Scheme::SpectralSplit] {
            for b in [Boundary::Periodic, Boundary::Dirichlet] {
                if scheme == Scheme::SpectralSplit && b == Boundary::Dirichlet {
                    continue;
                }
                let g = GridSpec::new(16, 16, [0.0, 0.0], [1.0, 1.0], b).unwrap();
                let cfg = SolverConfig { dt: 1e-4, scheme, ..SolverConfig::new(0.1, 1.0) };
                for c in [1.0, -1.0] {
                    let u = step(&ScalarField::constant(g, c, 0.0), &cfg).unwrap();
                    assert!(u.values().iter().all(|v| (v - c).abs() < 1e-14), "{scheme:?} {b:?}");
                    assert!((u.time() - 1e-4).abs() < 1e-18);
                }
            }
        }
    }

    #[test]
    fn explicit_cfl_is_enforced() {
        let g = periodic(32, 1.0);
        let cfg = SolverConfig { dt: 1e-3, scheme: Scheme::Explicit, ..SolverConfig::new(0.1, 1.0) };
        assert!(Stepper::new(g, &cfg, cfg.dt).is_err());
        let cfg = SolverConfig { dt: 4e-4, scheme: Scheme::Explicit, ..SolverConfig::new(0.02, 1.0) };
        assert!(Stepper::new(g, &cfg, cfg.dt).is_err());
    }

    #[test]
    fn dirichlet_semi_implicit_solves_the_linear_system() {
        // Oracle: residual of (I − dt Δ_h) v = rhs with the plain 5-point stencil.
        let g = GridSpec::new(21, 17, [-1.0, -0.5], [1.0, 0.9], Boundary::Dirichlet).unwrap();
        let u = ScalarField::from_fn(g, 0.0, |x, y| (0.5 * (x + 2.0 * y)).tanh() + 0.1 * (3.0 * x).sin()).unwrap();
        let cfg = SolverConfig { dt: 1e-3, ..SolverConfig::new(0.2, 1.0) };
        let v = step(&u, &cfg).unwrap();
        let lap = fd_laplacian(&v);
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                let k = g.idx(i, j);
                let lhs = v.values()[k] - cfg.dt * lap.values()[k];
                let rhs = u.values()[k] - cfg.dt * w1(u.values()[k]) / 0.04;
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
        for i in 0..g.nx {
            assert_eq!(v.get(i, 0), u.get(i, 0));
        }
    }

    #[test]
    fn periodic_semi_implicit_solves_the_linear_system() {
        let g = periodic(24, 1.0);
        let u = ScalarField::from_fn(g, 0.0, |x, y| (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).cos()).unwrap();
        let cfg = SolverConfig { dt: 1e-3, ..SolverConfig::new(0.2, 1.0) };
        let v = step(&u, &cfg).unwrap();
        let lap = fd_laplacian(&v);
        for k in 0..g.len() {
            let lhs = v.values()[k] - cfg.dt * lap.values()[k];
            let rhs = u.values()[k] - cfg.dt * w1(u.values()[k]) / 0.04;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn reaction_flow_solves_the_ode() {
        // Oracle: RK4 on u' = (u − u³)/ε².
        let g = periodic(8, 1.0);
        let cfg = SolverConfig { dt: 1e-3, scheme: Scheme::SpectralSplit, ..SolverConfig::new(0.1, 1.0) };
        let s = Stepper::new(g, &cfg, cfg.dt).unwrap();
        let mut v = vec![-1.5, -0.7, -0.1, 0.0, 0.3, 0.99, 1.2];
        let orig = v.clone();
        s.reaction_flow(&mut v, 0.01);
        for (u0, u1) in orig.iter().zip(&v) {
            let f = |u: f64| (u - u * u * u) / 0.01;
            let (mut u, h) = (*u0, 1e-5);
            for _ in 0..1000 {
                let k1 = f(u);
                let k2 = f(u + 0.5 * h * k1);
                let k3 = f(u + 0.5 * h * k2);
                let k4 = f(u + h * k3);
                u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            assert!((u - u1).abs() < 1e-9, "{u0}: {u} vs {u1}");
        }
    }

    #[test]
    fn divergence_is_reported() {
        let g = periodic(16, 1.0);
        let u = ScalarField::constant(g, 1.9, 0.0);
        let cfg = SolverConfig { dt: 0.05, ..SolverConfig::new(0.1, 1.0) };
        match step(&u, &cfg) {
            Err(Error::Diverged { time, bound }) => {
                assert!((time - 0.05).abs() < 1e-15);
                assert!(bound.contains("eps^2"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn standing_wave_is_nearly_stationary() {
        let eps = 0.05;
        let prof = CutoffProfile::new(eps).unwrap();
        // Two layers at y = ±1 on a periodic strip; both far fields are saturated.
        let g = GridSpec::new(8, 320, [0.0, -2.0], [0.1, 2.0], Boundary::Periodic).unwrap();
        let u0 = ScalarField::from_fn(g, 0.0, |_, y| prof.eval_all((y.abs() - 1.0) / eps)[0]).unwrap();
        let cfg = SolverConfig { scheme: Scheme::SpectralSplit, dt: eps * eps / 40.0, ..SolverConfig::new(eps, 1.0) };
        let u1 = step(&u0, &cfg).unwrap();
        let change = u0.values().iter().zip(u1.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        // Per unit time the change stays below K·ε with K = 2.
        assert!(change / cfg.dt <= 2.0 * eps, "{}", change / cfg.dt);
    }

    #[test]
    fn standing_wave_drift_over_unit_time() {
        let eps = 0.05;
        let prof = CutoffProfile::new(eps).unwrap();
        let g = GridSpec::new(6, 321, [0.0, -2.0], [0.1, 2.0], Boundary::Dirichlet).unwrap();
        let u0 = ScalarField::from_fn(g, 0.0, |_, y| prof.eval_all((y.abs() - 1.0) / eps)[0]).unwrap();
        let cfg = SolverConfig { snapshot_every: 400, ..SolverConfig::new(eps, 1.0) };
        let t = simulate(&u0, &cfg).unwrap();
        let drift = u0.values().iter().zip(t.last().values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(drift <= 1e-2, "{drift}");
        let e: Vec<f64> = t.snapshots().iter().map(|s| discrete_energy(s, eps)).collect();
        assert!(e.windows(2).all(|w| w[1] <= w[0] + 1e-8));
    }

    #[test]
    fn zero_span_gives_single_snapshot() {
        let g = periodic(16, 1.0);
        let u = ScalarField::constant(g, 0.2, 0.3);
        let cfg = SolverConfig::new(0.1, 0.3);
        let t = simulate(&u, &cfg).unwrap();
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn schedule_divides_horizon_evenly() {
        let cfg = SolverConfig { dt: 0.003, ..SolverConfig::new(0.1, 0.01) };
        let (n, dt) = cfg.schedule(0.0).unwrap();
        assert_eq!(n, 4);
        assert!((dt - 0.0025).abs() < 1e-16);
        let cfg = SolverConfig { dt: 0.0025, ..cfg };
        assert_eq!(cfg.schedule(0.0).unwrap().0, 4);
        assert!(cfg.schedule(0.02).is_err());
    }

    #[test]
    fn snapshot_selection_with_brackets() {
        let g = periodic(8, 1.0);
        let u = ScalarField::constant(g, 1.0, 0.0);
        let cfg = SolverConfig { dt: 0.1, snapshot_every: 5, bracket: true, ..SolverConfig::new(0.5, 1.2) };
        let t = simulate(&u, &cfg).unwrap();
        assert_eq!(t.steps(), &[0, 1, 4, 5, 6, 9, 10, 11, 12]);
        assert!((t.snapshots()[4].time() - 0.6).abs() < 1e-15);
    }
}
