use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::scenario::{run_scenario, ScenarioOutcome};
use crate::thresholds::Thresholds;
use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    NodalHausdorff,
    CurvatureSupError,
    PhiSup,
    CsfDefect,
}

impl Metric {
    /// Report quantity whose sup over the run is the metric.
    pub fn quantity(self) -> &'static str {
        match self {
            Self::NodalHausdorff => "nodal-hausdorff",
            Self::CurvatureSupError => "curvature-sup-error",
            Self::PhiSup => "phi-sup",
            Self::CsfDefect => "csf-defect",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub metric: Metric,
    /// `(ε, error)` with `ε` strictly decreasing.
    pub rows: Vec<(f64, f64)>,
    pub fitted_order: f64,
    /// Root-mean-square residual of the log–log fit.
    pub fit_residual: f64,
}

impl ConvergenceTable {
    pub fn new(metric: Metric, rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.len() < 3 {
            return Err(HarnessError::Config(format!("a convergence table needs at least 3 rows, got {}", rows.len())));
        }
        if rows.windows(2).any(|w| !(w[1].0 < w[0].0)) {
            return Err(HarnessError::Config("epsilons must be strictly decreasing".into()));
        }
        if rows.iter().any(|r| !(r.0 > 0.0 && r.1 > 0.0 && r.1.is_finite())) {
            return Err(HarnessError::Measurement(format!("log-log fit needs positive finite values: {rows:?}")));
        }
        let (fitted_order, fit_residual) = fit_order(&rows);
        Ok(Self { metric, rows, fitted_order, fit_residual })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["epsilon", self.metric.quantity()])?;
        for (e, v) in &self.rows {
            w.write_record([e.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `log e` against `log ε`, and the RMS residual.
pub fn fit_order(rows: &[(f64, f64)]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = rows.iter().map(|(e, v)| (e.ln(), v.ln())).collect();
    let (slope, icept) = crate::scenario::fit_line(&pts);
    let ss: f64 = pts.iter().map(|(x, y)| (y - slope * x - icept).powi(2)).sum();
    (slope, (ss / pts.len() as f64).sqrt())
}

/// Runs `base` at every `ε` (refined grid and step) concurrently, each in
/// `out/eps_<ε>` when `out` is given.
pub fn sweep_outcomes(base: &ScenarioConfig, epsilons: &[f64], th: &Thresholds, out: Option<&Path>) -> Result<Vec<ScenarioOutcome>> {
    if epsilons.len() < 3 {
        return Err(HarnessError::Config("a sweep needs at least 3 epsilons".into()));
    }
    if epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(HarnessError::Config("epsilons must be strictly decreasing".into()));
    }
    let cfgs = epsilons.iter().map(|e| base.refined(*e)).collect::<Result<Vec<_>>>()?;
    let results: Vec<Result<ScenarioOutcome>> = cfgs
        .par_iter()
        .map(|c| {
            let dir = out.map(|d| d.join(format!("eps_{}", c.epsilon)));
            run_scenario(c, th, dir.as_deref())
        })
        .collect();
    let mut done = Vec::new();
    for r in results {
        match r {
            Ok(o) => done.push(o),
            Err(e) => return Err(HarnessError::Sweep { completed: done.iter().map(|o| o.config.epsilon).collect(), source: Box::new(e) }),
        }
    }
    Ok(done)
}

pub fn table_from(outcomes: &[ScenarioOutcome], metric: Metric) -> Result<ConvergenceTable> {
    let rows = outcomes
        .iter()
        .map(|o| {
            o.sup(metric.quantity())
                .map(|v| (o.config.epsilon, v))
                .ok_or_else(|| HarnessError::Measurement(format!("{} missing at eps = {}", metric.quantity(), o.config.epsilon)))
        })
        .collect::<Result<Vec<_>>>()?;
    ConvergenceTable::new(metric, rows)
}

pub fn convergence_sweep(base: &ScenarioConfig, epsilons: &[f64], metric: Metric, th: &Thresholds, out: Option<&Path>) -> Result<ConvergenceTable> {
    table_from(&sweep_outcomes(base, epsilons, th, out)?, metric)
}
