use std::path::Path;

use aclab_core::approximation::{approximate_snapshot, phi_report, NormalSamples};
use aclab_core::csf::circle_exact;
use aclab_core::diagnostics::{discrepancy, entropy, monotonicity_trace, DiagnosticsReport, SearchSpec};
use aclab_core::field::{Boundary, Interp, ScalarField};
use aclab_core::geometry::{
    extract_nodal_set, hausdorff_distance, normal_velocity_with, parabolic_holder_seminorm, polyline_curvature_span,
    HolderSample, Polyline, DEFAULT_GRAD_FLOOR,
};
use aclab_core::profile::ALPHA;
use aclab_core::solver::{init_from_curve, simulate, Trajectory};

use crate::check::Check;
use crate::curvature::enhanced_max_on_nodal_set;
use crate::config::{ScenarioConfig, ScenarioKind};
use crate::plot::{write_series, Series};
use crate::thresholds::Thresholds;
use crate::{HarnessError, Result};

/// Arclength span of the curvature fit on nodal polylines.
pub const CURVATURE_SPAN: f64 = 0.1;
/// Parabolic separation floor of the curvature Hölder seminorm; fixed across `ε`.
pub const HOLDER_MIN_SEP: f64 = 0.1;
/// Vertices of the exact reference circle.
const REFERENCE_VERTICES: usize = 4096;
const INTERP: Interp = Interp::Lagrange(6);

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub config: ScenarioConfig,
    pub report: DiagnosticsReport,
    pub checks: Vec<Check>,
    pub series: Vec<Series>,
    pub trajectory: Trajectory,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        crate::check::all_pass(&self.checks)
    }

    /// Largest value of a report quantity (the sup over the run).
    pub fn sup(&self, quantity: &str) -> Option<f64> {
        let v = self.report.values(quantity);
        (!v.is_empty()).then(|| v.into_iter().fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Builds the initial data, simulates and runs the diagnostic battery. With
/// `out`, writes `report.csv`, `config.json` and one two-column CSV per plot;
/// on failure the rows gathered so far are still written.
pub fn run_scenario(cfg: &ScenarioConfig, th: &Thresholds, out: Option<&Path>) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let mut st = State::new(cfg);
    let result = st.run(th);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let mut rep = st.report.clone();
        rep.extend(th.echo(cfg.name.label()));
        rep.write_csv(&dir.join("report.csv"))?;
        std::fs::write(dir.join("config.json"), serde_json::to_string_pretty(cfg)?)?;
        for s in &st.series {
            write_series(&dir.join(format!("plot_{}.csv", s.name)), s)?;
        }
    }
    let trajectory = result?;
    Ok(ScenarioOutcome { config: cfg.clone(), report: st.report, checks: st.checks, series: st.series, trajectory })
}

struct State<'a> {
    cfg: &'a ScenarioConfig,
    label: &'static str,
    eps: f64,
    report: DiagnosticsReport,
    checks: Vec<Check>,
    series: Vec<Series>,
}

impl<'a> State<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Self {
        Self {
            cfg,
            label: cfg.name.label(),
            eps: cfg.epsilon,
            report: DiagnosticsReport::new(),
            checks: Vec::new(),
            series: Vec::new(),
        }
    }

    fn push(&mut self, q: &str, v: f64, arg1: Option<f64>, arg2: Option<f64>) {
        self.report.push(self.label, self.eps, q, v, arg1, arg2);
    }

    fn run(&mut self, th: &Thresholds) -> Result<Trajectory> {
        let cfg = self.cfg;
        let curve = cfg.initial_curve()?;
        let u0 = init_from_curve(&curve, self.eps, &cfg.grid)?;
        let (xi, l1) = discrepancy(&u0, self.eps)?;
        self.push("discrepancy-l1", l1, Some(0.0), None);
        self.push("discrepancy-max", xi.max(), Some(0.0), None);
        let name = format!("{}: initial pointwise discrepancy", self.label);
        if self.saturated_interior() {
            self.checks.push(Check::at_most(name, xi.max(), th.discrepancy_pointwise));
        } else {
            self.checks.push(Check::report(name + " (report only: clamped grid or unsaturated interior)", xi.max()));
        }

        let traj = simulate(&u0, &cfg.solver)?;
        let regular = regular_indices(&traj, cfg.solver.snapshot_every);
        let last = traj.last();
        let (_, l1) = discrepancy(last, self.eps)?;
        self.push("discrepancy-l1", l1, Some(last.time()), None);

        let search = self.search_spec();
        let e0 = entropy(&u0, self.eps, &search)?.value;
        self.push("entropy", e0, Some(0.0), None);
        let mut entropies = vec![(0.0, e0)];
        let tracked = matches!(cfg.name, ScenarioKind::GapProbe | ScenarioKind::PerturbedGraph);
        for &k in &regular[1..] {
            if tracked || k == traj.len() - 1 {
                let u = &traj.snapshots()[k];
                let e = entropy(u, self.eps, &search)?.value;
                self.push("entropy", e, Some(u.time()), None);
                entropies.push((u.time(), e));
            }
        }
        self.series.push(Series::new("entropy", "t", "entropy", entropies.clone()));

        self.monotonicity(&traj)?;
        self.approximation(&traj, &regular, th)?;
        let a0 = self.enhanced_on_nodal_set(&u0)?;
        let a_max = self.enhanced_on_nodal_set(last)?;

        match cfg.name {
            ScenarioKind::Flat => {
                let d = self.displacement(&traj, &regular)?;
                self.checks.push(Check::relative("flat: entropy", e0, ALPHA, th.flat_entropy_rel));
                self.checks.push(Check::at_most("flat: nodal displacement over the run", d, th.flat_displacement));
                // Later snapshots carry a wall boundary layer: the clamped columns keep the
                // continuous profile while the interior relaxes to the discrete one.
                self.checks.push(Check::at_most("flat: initial max |A| on the nodal set", a0, th.flat_a_max));
            }
            ScenarioKind::Circle => self.circle(&traj, &regular, a_max, th)?,
            ScenarioKind::GapProbe | ScenarioKind::PerturbedGraph => self.graph(&traj, &regular, &entropies, th)?,
            ScenarioKind::GrimReaper => self.tip(&traj, &regular, th)?,
        }
        Ok(traj)
    }

    /// The pointwise bound needs Fourier derivatives (periodic grids; central
    /// differences at spacing `ε/4` are off by about `0.1`) and initial data that
    /// reaches the wells inside a circle, where the kink of the distance at the
    /// centre otherwise survives in `ḡ`.
    fn saturated_interior(&self) -> bool {
        let eps = self.eps;
        let inside = self.cfg.name != ScenarioKind::Circle || self.cfg.params.radius >= 3.0 * eps * eps.ln().abs();
        inside && self.cfg.grid.boundary == Boundary::Periodic
    }

    /// Entropy search over scales up to half the larger window side for the
    /// grim reaper, whose two tails only add up at scales beyond their separation.
    fn search_spec(&self) -> SearchSpec {
        let mut s = SearchSpec::default();
        if self.cfg.name == ScenarioKind::GrimReaper {
            let [lx, ly] = self.cfg.grid.extent();
            s.scales = Some([(4.0 * self.eps).powi(2), (0.5 * lx.max(ly)).powi(2)]);
        }
        s
    }

    fn monotonicity(&mut self, traj: &Trajectory) -> Result<()> {
        let cfg = self.cfg;
        let p = &cfg.params;
        let (y, s_final) = match cfg.name {
            ScenarioKind::Circle => (p.center, p.s_final.unwrap_or(0.5 * p.radius * p.radius + 0.05)),
            ScenarioKind::GrimReaper => ([0.0, cfg.solver.t_end], p.s_final.unwrap_or(cfg.solver.t_end + 0.25)),
            _ => (cfg.grid.center(), p.s_final.unwrap_or(cfg.solver.t_end + 0.1)),
        };
        let tr = monotonicity_trace(traj, y, s_final)?;
        for (t, v) in tr.times.iter().zip(&tr.values) {
            self.push("monotonicity", *v, Some(*t), Some(s_final));
        }
        self.push("monotonicity-jump", tr.max_upward_jump, None, Some(s_final));
        self.series.push(Series::new("monotonicity", "t", "gaussian_density", tr.times.iter().copied().zip(tr.values.iter().copied()).collect()));
        Ok(())
    }

    fn approximation(&mut self, traj: &Trajectory, regular: &[usize], th: &Thresholds) -> Result<()> {
        let (mut us, mut gs): (Vec<NormalSamples>, Vec<NormalSamples>) = (Vec::new(), Vec::new());
        let mut residual: f64 = 0.0;
        for &k in regular {
            let u = &traj.snapshots()[k];
            let a = approximate_snapshot(u, self.eps)?;
            let r = a.shift.max_residual();
            residual = residual.max(r);
            self.report.extend(a.shift.to_report(self.label, self.eps, u.time()));
            us.push(a.samples);
            gs.push(a.gstar);
        }
        let phi = phi_report(&us, &gs, self.eps, th.holder_theta)?;
        self.report.extend(phi.to_report(self.label, self.eps, traj.last().time()));
        self.push("shift-residual-max", residual, None, None);
        self.checks.push(Check::at_most(format!("{}: shift orthogonality residual", self.label), residual, th.shift_residual));
        Ok(())
    }

    fn enhanced_on_nodal_set(&mut self, u: &ScalarField) -> Result<f64> {
        let a_max = enhanced_max_on_nodal_set(u, 4.0 * self.eps)?;
        self.push("a-max-nodal", a_max, Some(u.time()), None);
        Ok(a_max)
    }

    fn displacement(&mut self, traj: &Trajectory, regular: &[usize]) -> Result<f64> {
        let c0 = longest_nodal(&traj.snapshots()[0])?;
        let mut worst: f64 = 0.0;
        let mut pts = Vec::new();
        for &k in regular {
            let u = &traj.snapshots()[k];
            let d = hausdorff_distance(&longest_nodal(u)?, &c0);
            self.push("nodal-displacement", d, Some(u.time()), None);
            pts.push((u.time(), d));
            worst = worst.max(d);
        }
        self.series.push(Series::new("displacement", "t", "hausdorff", pts));
        Ok(worst)
    }

    fn circle(&mut self, traj: &Trajectory, regular: &[usize], a_max: f64, th: &Thresholds) -> Result<()> {
        let p = &self.cfg.params;
        let mut holder = Vec::new();
        let mut radius_pts = Vec::new();
        let mut final_err = f64::NAN;
        for &k in regular {
            let u = &traj.snapshots()[k];
            let t = u.time();
            let Some(r) = circle_exact(p.radius, t)? else { break };
            let gamma = longest_nodal(u)?;
            let exact = Polyline::circle(p.center, r, REFERENCE_VERTICES)?;
            self.push("nodal-hausdorff", hausdorff_distance(&gamma, &exact), Some(t), None);
            let mean_r = gamma.vertices().iter().map(|v| (v[0] - p.center[0]).hypot(v[1] - p.center[1])).sum::<f64>() / gamma.len() as f64;
            final_err = (mean_r - r).abs();
            self.push("nodal-radius", mean_r, Some(t), Some(r));
            radius_pts.push((t, mean_r));

            let geo = polyline_curvature_span(&gamma, CURVATURE_SPAN);
            let kerr = geo.curvature.iter().fold(0.0f64, |m, kv| m.max((kv - 1.0 / r).abs()));
            self.push("curvature-sup-error", kerr, Some(t), None);
            holder.extend(gamma.vertices().iter().zip(&geo.curvature).map(|(v, kv)| HolderSample { point: *v, time: t, value: *kv }));

            if k > 0 && k + 1 < traj.len() {
                let vel = normal_velocity_with(traj, k, DEFAULT_GRAD_FLOOR, INTERP)?;
                let mut defect: f64 = 0.0;
                for (c, vs) in vel.polylines.iter().zip(&vel.values) {
                    let g = polyline_curvature_span(c, CURVATURE_SPAN);
                    for (v, kv) in vs.iter().zip(&g.curvature) {
                        if v.is_finite() {
                            defect = defect.max((v - kv).abs());
                        }
                    }
                }
                self.push("csf-defect", defect, Some(t), None);
            }
        }
        self.series.push(Series::new("nodal_radius", "t", "radius", radius_pts));
        let seminorm = parabolic_holder_seminorm(&holder, th.holder_theta, HOLDER_MIN_SEP)?;
        self.push("curvature-holder", seminorm, Some(th.holder_theta), Some(HOLDER_MIN_SEP));

        let t_last = traj.last().time();
        if let Some(r) = circle_exact(p.radius, t_last)? {
            self.push("a-product", a_max * r, Some(t_last), Some(r));
        }
        let jump = self.report.get("monotonicity-jump").unwrap_or(f64::NAN);
        self.checks.push(Check::at_most("circle: final nodal radius error", final_err, th.circle_radius_error));
        self.checks.push(Check::at_most("circle: monotonicity upward jump", jump, th.monotonicity_jump));
        Ok(())
    }

    fn graph(&mut self, traj: &Trajectory, regular: &[usize], entropies: &[(f64, f64)], th: &Thresholds) -> Result<()> {
        let cfg = self.cfg;
        let p = &cfg.params;
        let k = p.wavenumber;
        let mut amps = Vec::new();
        for &i in regular {
            let u = &traj.snapshots()[i];
            let a = mode_amplitude(&longest_nodal(u)?, cfg.grid.x0, cfg.grid.x1, k)?;
            self.push("graph-amplitude", a, Some(u.time()), None);
            amps.push((u.time(), a));
        }
        self.series.push(Series::new("amplitude", "t", "amplitude", amps.clone()));
        let a0 = amps[0].1;
        let (t_end, a_end) = *amps.last().expect("initial snapshot");
        let e_max = entropies.iter().fold(0.0f64, |m, e| m.max(e.1));
        self.push("entropy-max", e_max, None, None);
        if cfg.name == ScenarioKind::GapProbe && a0.abs() > 0.0 {
            let ratio = a_end / a0;
            let heat = (-k * k * t_end).exp();
            self.push("amplitude-ratio", ratio, Some(t_end), Some(heat));
            self.checks.push(Check::at_most("gap-probe: final / initial amplitude", ratio, th.gap_decay));
            self.checks.push(Check::within("gap-probe: amplitude ratio vs heat decay", ratio / heat, 1.0 / th.gap_heat_factor, th.gap_heat_factor));
            let increases = amps.windows(2).skip(1).filter(|w| w[1].1.abs() > w[0].1.abs()).count();
            self.checks.push(Check::at_most("gap-probe: amplitude increases after the first interval", increases as f64, 0.0));
        }
        if cfg.name == ScenarioKind::GapProbe {
            self.checks.push(Check::at_most("gap-probe: entropy / alpha along the run", e_max / ALPHA, th.gap_entropy_max));
        }
        Ok(())
    }

    fn tip(&mut self, traj: &Trajectory, regular: &[usize], th: &Thresholds) -> Result<()> {
        let lambda = self.cfg.params.lambda;
        let mut pts = Vec::new();
        for &i in regular {
            let u = &traj.snapshots()[i];
            let y = crossing_height(&longest_nodal(u)?, 0.0)
                .ok_or_else(|| HarnessError::Measurement(format!("no nodal crossing of x = 0 at t = {}", u.time())))?;
            self.push("tip-height", y, Some(u.time()), None);
            pts.push((u.time(), y));
        }
        self.series.push(Series::new("tip_height", "t", "y", pts.clone()));
        // Skip the first interval, where the layer relaxes from its initial data.
        let speed = fit_line(&pts[1.min(pts.len() - 2)..]).0;
        self.push("tip-speed", speed, None, Some(1.0 / lambda));
        self.checks.push(Check::relative("grim-reaper: tip speed", speed, 1.0 / lambda, th.grim_tip_speed_rel));
        Ok(())
    }
}

/// Indices of the snapshots on the regular measurement schedule, plus the last one.
pub fn regular_indices(traj: &Trajectory, every: usize) -> Vec<usize> {
    let n = traj.len();
    let mut v: Vec<usize> = traj.steps().iter().enumerate().filter(|(_, s)| *s % every == 0).map(|(i, _)| i).collect();
    if v.last() != Some(&(n - 1)) {
        v.push(n - 1);
    }
    v
}

pub fn longest_nodal(u: &ScalarField) -> Result<Polyline> {
    extract_nodal_set(u)
        .into_iter()
        .max_by(|a, b| a.length().total_cmp(&b.length()))
        .ok_or_else(|| HarnessError::Measurement(format!("empty nodal set at t = {}", u.time())))
}

/// Height of the first crossing of the vertical line `x = x0`.
pub fn crossing_height(c: &Polyline, x0: f64) -> Option<f64> {
    (0..c.segment_count()).find_map(|k| {
        let (a, b) = c.segment(k);
        if (a[0] - x0) * (b[0] - x0) <= 0.0 && a[0] != b[0] {
            let t = (x0 - a[0]) / (b[0] - a[0]);
            Some(a[1] + t * (b[1] - a[1]))
        } else {
            None
        }
    })
}

/// `2/L ∫ f(x) sin(k(x − x0)) dx` over `[x0, x1]` for the nodal graph `f`, by the midpoint rule.
pub fn mode_amplitude(c: &Polyline, x0: f64, x1: f64, k: f64) -> Result<f64> {
    let n = 2000;
    let dx = (x1 - x0) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let x = x0 + (i as f64 + 0.5) * dx;
        let f = crossing_height(c, x).ok_or_else(|| HarnessError::Measurement(format!("nodal set is not a graph over x = {x}")))?;
        acc += f * (k * (x - x0)).sin() * dx;
    }
    Ok(2.0 * acc / (x1 - x0))
}

/// Least-squares slope and intercept.
pub fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mode_amplitude_of_a_sine() {
        let v = (0..=400).map(|i| {
            let x = 1.2 - 1.4 * i as f64 / 400.0;
            [x, 0.05 * (2.0 * PI * x).sin()]
        });
        let c = Polyline::new(v.collect(), false).unwrap();
        let a = mode_amplitude(&c, 0.0, 1.0, 2.0 * PI).unwrap();
        assert!((a - 0.05).abs() < 1e-4, "{a}");
    }

    #[test]
    fn line_fit_recovers_slope() {
        let pts: Vec<_> = (0..5).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        let (m, b) = fit_line(&pts);
        assert!((m - 3.0).abs() < 1e-12 && (b + 1.0).abs() < 1e-12);
    }
}
