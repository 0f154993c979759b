//! Scenario orchestration for the Allen–Cahn laboratory: presets, `ε`-sweeps
//! with convergence-order fits, the curvature and gap studies, and pass/fail
//! checks against the bounds in `thresholds.json`.

pub mod check;
pub mod config;
pub mod curvature;
pub mod plot;
pub mod scenario;
pub mod sweep;
pub mod thresholds;

pub use check::{all_pass, Check};
pub use config::{ScenarioConfig, ScenarioKind, ScenarioParams};
pub use curvature::{curvature_sweep, grim_reaper_study, Study};
pub use scenario::{run_scenario, ScenarioOutcome};
pub use sweep::{convergence_sweep, fit_order, ConvergenceTable, Metric};
pub use thresholds::Thresholds;

use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] aclab_core::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("measurement: {0}")]
    Measurement(String),
    #[error("sweep aborted after eps = {completed:?}: {source}")]
    Sweep { completed: Vec<f64>, source: Box<HarnessError> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Runs a gap-probe scenario: a small sinusoidal perturbation of the flat layer.
pub fn gap_probe(cfg: &ScenarioConfig, th: &Thresholds, out: Option<&Path>) -> Result<ScenarioOutcome> {
    if cfg.name != ScenarioKind::GapProbe {
        return Err(HarnessError::Config(format!("gap_probe needs a gap-probe config, got {}", cfg.name.label())));
    }
    run_scenario(cfg, th, out)
}
