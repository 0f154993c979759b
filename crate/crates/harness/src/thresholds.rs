use serde::{Deserialize, Serialize};

use aclab_core::diagnostics::DiagnosticsReport;

/// Every assertion bound used by the harness, loaded from `thresholds.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub discrepancy_l1: f64,
    pub discrepancy_pointwise: f64,
    pub flat_entropy_rel: f64,
    pub flat_displacement: f64,
    pub flat_a_max: f64,
    pub circle_entropy_rel: f64,
    pub dilation_rel: f64,
    pub circle_radius_error: f64,
    pub grim_tip_speed_rel: f64,
    pub monotonicity_jump: f64,
    pub order_nodal: f64,
    pub order_csf_defect: f64,
    pub order_phi: f64,
    pub holder_theta: f64,
    pub holder_ratio: f64,
    pub shift_residual: f64,
    pub curvature_product: [f64; 2],
    /// `δ₀/α` in the entropy hypothesis of the curvature sweep.
    pub entropy_margin: f64,
    /// Grim reaper window entropy lower bound, in units of `α`.
    pub grim_entropy_min: f64,
    pub gap_decay: f64,
    /// Gap probe entropy ceiling, in units of `α`.
    pub gap_entropy_max: f64,
    pub gap_heat_factor: f64,
    pub fit_exact: f64,
}

pub const DEFAULTS_JSON: &str = include_str!("../thresholds.json");

impl Default for Thresholds {
    fn default() -> Self {
        serde_json::from_str(DEFAULTS_JSON).expect("embedded thresholds.json is valid")
    }
}

impl Thresholds {
    /// Rows `threshold:<name>` so every report carries the bounds it was judged by.
    pub fn echo(&self, scenario: &str) -> DiagnosticsReport {
        let mut r = DiagnosticsReport::new();
        let v = serde_json::to_value(self).expect("thresholds serialize");
        for (k, x) in v.as_object().expect("object") {
            match x {
                serde_json::Value::Array(a) => {
                    let lo = a[0].as_f64().unwrap_or(f64::NAN);
                    let hi = a[1].as_f64().unwrap_or(f64::NAN);
                    r.push(scenario, f64::NAN, &format!("threshold:{k}"), lo, Some(hi), None);
                }
                _ => r.push(scenario, f64::NAN, &format!("threshold:{k}"), x.as_f64().unwrap_or(f64::NAN), None, None),
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_defaults_parse() {
        let t = Thresholds::default();
        assert_eq!(t.curvature_product, [0.8, 1.5]);
        assert_eq!(t.holder_theta, 0.5);
        assert_eq!(t.echo("x").rows.len(), 23);
    }
}
