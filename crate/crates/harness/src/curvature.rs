use std::path::Path;

use rayon::prelude::*;

use aclab_core::diagnostics::{entropy, DiagnosticsReport, SearchSpec};
use aclab_core::field::{derivatives, Boundary, DerivativeScheme, GridSpec, Interp, ScalarField};
use aclab_core::geometry::{extract_nodal_set, sample_enhanced_a};
use aclab_core::profile::ALPHA;
use aclab_core::solver::init_from_curve;

use crate::check::Check;
use crate::config::{grim_reaper_curve, ScenarioConfig, ScenarioKind};
use crate::plot::{write_series, Series};
use crate::scenario::run_scenario;
use crate::thresholds::Thresholds;
use crate::{HarnessError, Result};

/// Report, checks and plot data of a multi-run study.
#[derive(Debug, Clone, Default)]
pub struct Study {
    pub report: DiagnosticsReport,
    pub checks: Vec<Check>,
    pub series: Vec<Series>,
}

impl Study {
    pub fn passed(&self) -> bool {
        crate::check::all_pass(&self.checks)
    }

    pub fn write(&self, dir: &Path, th: &Thresholds, label: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut rep = self.report.clone();
        rep.extend(th.echo(label));
        rep.write_csv(&dir.join("report.csv"))?;
        for s in &self.series {
            write_series(&dir.join(format!("plot_{}.csv", s.name)), s)?;
        }
        Ok(())
    }
}

/// Run time of each circle in the sweep, as a fraction of `r²`.
pub const SWEEP_TIME_FRACTION: f64 = 0.05;

/// Max of `|𝒜|` sampled at the nodal vertices, skipping vertices within
/// `clearance` of a clamped wall.
pub fn enhanced_max_on_nodal_set(u: &ScalarField, clearance: f64) -> Result<f64> {
    let g = *u.grid();
    let d = derivatives(u, DerivativeScheme::auto(&g), true)?;
    let inside = |p: [f64; 2]| {
        g.boundary == Boundary::Periodic || (p[0] - g.x0).min(g.x1 - p[0]).min(p[1] - g.y0).min(g.y1 - p[1]) >= clearance
    };
    let mut m: f64 = 0.0;
    for c in extract_nodal_set(u) {
        for p in c.vertices().iter().filter(|p| inside(**p)) {
            if let Some(a) = sample_enhanced_a(&d, *p, Interp::Lagrange(6)) {
                m = m.max(a);
            }
        }
    }
    Ok(m)
}

/// Circle runs of duration `0.05 r²` at one `ε`; records `max|𝒜|` on the
/// nodal set, its product with the current radius and the entropy, plus the
/// flat layer as the `r = ∞` proxy.
pub fn curvature_sweep(radii: &[f64], eps: f64, th: &Thresholds) -> Result<Study> {
    let runs: Vec<Result<(f64, f64, f64, f64)>> = radii
        .par_iter()
        .map(|&r| {
            let mut cfg = ScenarioConfig::preset(ScenarioKind::Circle, eps)?;
            cfg.params.radius = r;
            cfg.params.measurements = 1;
            cfg.solver.t_end = SWEEP_TIME_FRACTION * r * r;
            cfg.solver.dt = eps * eps / 10.0;
            cfg.align_schedule();
            let out = run_scenario(&cfg, th, None)?;
            let last = out.trajectory.last();
            let rt = (r * r - 2.0 * last.time()).sqrt();
            let a = out.report.values("a-max-nodal").last().copied().unwrap_or(f64::NAN);
            let e = out.report.values("entropy").last().copied().unwrap_or(f64::NAN);
            Ok((r, rt, a, e))
        })
        .collect();
    let mut st = Study::default();
    let bound = (2.0 - th.entropy_margin) * ALPHA;
    let mut pts = Vec::new();
    for run in runs {
        let (r, rt, a, e) = run?;
        st.report.push("curvature-sweep", eps, "a-max-nodal", a, Some(r), Some(rt));
        st.report.push("curvature-sweep", eps, "a-product", a * rt, Some(r), Some(rt));
        st.report.push("curvature-sweep", eps, "entropy", e, Some(r), None);
        pts.push((r, a * rt));
        let [lo, hi] = th.curvature_product;
        st.checks.push(Check::within(format!("curvature-sweep r = {r}: max|A|·r"), a * rt, lo, hi));
        st.checks.push(Check::at_most(format!("curvature-sweep r = {r}: entropy"), e, bound));
    }
    st.series.push(Series::new("a_product", "r", "max_a_times_r", pts));

    let flat = ScenarioConfig::preset(ScenarioKind::Flat, eps)?;
    let u = init_from_curve(&flat.initial_curve()?, eps, &flat.grid)?;
    let a = enhanced_max_on_nodal_set(&u, 4.0 * eps)?;
    st.report.push("curvature-sweep", eps, "a-max-nodal", a, Some(f64::INFINITY), None);
    st.checks.push(Check::at_most("curvature-sweep flat layer: max|A|", a, th.flat_a_max));
    Ok(st)
}

/// Window around a grim reaper of scale `λ` with its tails cut at the window top.
pub fn grim_reaper_field(lambda: f64, eps: f64, lo: [f64; 2], hi: [f64; 2]) -> Result<ScalarField> {
    let h = eps / 4.0;
    let grid = GridSpec::with_spacing(h, lo, hi, Boundary::Dirichlet)?;
    let curve = grim_reaper_curve(lambda, hi[1] + lambda.max(1.0), 0.5 * h)?;
    Ok(init_from_curve(&curve, eps, &grid)?)
}

/// Entropy search reaching scales of half the longer window side.
pub fn wide_search(eps: f64, lo: [f64; 2], hi: [f64; 2]) -> SearchSpec {
    let side = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    SearchSpec { scales: Some([(4.0 * eps).powi(2), (0.5 * side).powi(2)]), ..SearchSpec::default() }
}

/// Sharpness exhibit: entropy of a tall grim reaper window (asserted against
/// `grim_entropy_min·α`) and `max|𝒜|·R` with `R = 1` on a fixed window as
/// the curve is shrunk by `λ` (reported only). Vertices within `4ε` of the
/// clamped walls are left out of the maximum.
pub fn grim_reaper_study(eps_entropy: f64, eps_trend: f64, lambdas: &[f64], th: &Thresholds) -> Result<Study> {
    let mut st = Study::default();
    let (lo, hi) = ([-2.5, -0.5], [2.5, 40.0]);
    let u = grim_reaper_field(1.0, eps_entropy, lo, hi)?;
    let e = entropy(&u, eps_entropy, &wide_search(eps_entropy, lo, hi))?;
    st.report.push("grim-reaper", eps_entropy, "entropy", e.value, Some(e.s), Some(e.y[1]));
    st.checks.push(Check::at_least("grim-reaper window entropy / alpha", e.value / ALPHA, th.grim_entropy_min));

    let (lo, hi) = ([-2.0, -0.5], [2.0, 2.0]);
    let rows: Vec<Result<(f64, f64, f64)>> = lambdas
        .par_iter()
        .map(|&l| {
            let u = grim_reaper_field(l, eps_trend, lo, hi)?;
            let a = enhanced_max_on_nodal_set(&u, 4.0 * eps_trend)?;
            let e = entropy(&u, eps_trend, &wide_search(eps_trend, lo, hi))?.value;
            Ok((l, a, e))
        })
        .collect();
    let mut pts = Vec::new();
    for r in rows {
        let (l, a, e) = r?;
        st.report.push("grim-reaper-trend", eps_trend, "a-product", a, Some(l), None);
        st.report.push("grim-reaper-trend", eps_trend, "entropy", e, Some(l), None);
        st.checks.push(Check::report(format!("grim-reaper trend lambda = {l}: max|A|·R (R = 1)"), a));
        pts.push((1.0 / l, a));
    }
    if pts.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(HarnessError::Config("lambdas must be strictly decreasing".into()));
    }
    st.series.push(Series::new("grim_trend", "inverse_lambda", "max_a_times_r", pts));
    Ok(st)
}
