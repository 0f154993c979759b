use serde::Serialize;

use super::{energy_measure, GaussianMeasure};
use crate::error::invalid;
use crate::solver::Trajectory;
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// `max(0, max_k F(t_{k+1}) − F(t_k))`
    pub max_upward_jump: f64,
}

/// `F(t) = ∫ Ψ_{y, s_final − t} dμ_ε(t)` on every snapshot.
pub fn monotonicity_trace(traj: &Trajectory, y: [f64; 2], s_final: f64) -> Result<MonotonicityTrace> {
    let eps = traj.config.epsilon;
    let times = traj.times();
    if let Some(t) = times.iter().find(|t| **t >= s_final) {
        return invalid(format!("snapshot time {t} is not below s_final = {s_final}"));
    }
    let mut values = Vec::with_capacity(times.len());
    for u in traj.snapshots() {
        values.push(energy_measure(u, eps)?.probe(y, s_final - u.time()));
    }
    let max_upward_jump = values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Ok(MonotonicityTrace { times, values, max_upward_jump })
}
