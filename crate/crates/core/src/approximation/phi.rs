use serde::Serialize;

use super::NormalSamples;
use crate::diagnostics::DiagnosticsReport;
use crate::error::invalid;
use crate::geometry::{parabolic_holder_seminorm, HolderSample};
use crate::Result;

/// Vertices per line kept for the Hölder pair scan.
const HOLDER_VERTICES: usize = 48;
/// Normal samples skipped between Hölder samples.
const HOLDER_Z_STRIDE: usize = 4;

/// Norms of `φ = u − g*` on normal lines (profile units, rescaled time `t/ε²`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiReport {
    pub sup_norm: f64,
    pub grad_sup: f64,
    pub hess_sup: f64,
    pub time_deriv_sup: f64,
    /// Parabolic `C^θ` seminorm of `φ_zz`.
    pub holder_c2theta: f64,
}

impl PhiReport {
    /// `‖φ‖_{C^{2,θ}}`-style sum of all parts.
    pub fn c2theta_norm(&self) -> f64 {
        self.sup_norm + self.grad_sup + self.hess_sup + self.time_deriv_sup + self.holder_c2theta
    }

    pub fn to_report(&self, scenario: &str, eps: f64, time: f64) -> DiagnosticsReport {
        let mut r = DiagnosticsReport::new();
        for (q, v) in [
            ("phi-sup", self.sup_norm),
            ("phi-grad-sup", self.grad_sup),
            ("phi-hess-sup", self.hess_sup),
            ("phi-time-deriv-sup", self.time_deriv_sup),
            ("phi-holder-c2theta", self.holder_c2theta),
        ] {
            r.push(scenario, eps, q, v, Some(time), None);
        }
        r
    }
}

/// `φ` on the lines valid in both inputs; `None` elsewhere.
fn difference(u: &NormalSamples, g: &NormalSamples) -> Vec<Option<Vec<f64>>> {
    u.values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x - y).collect()),
            _ => None,
        })
        .collect()
}

struct Derivs {
    grad: f64,
    hess: f64,
    zz: Vec<Option<Vec<f64>>>,
}

fn spatial(phi: &[Option<Vec<f64>>], y: &[f64], closed: bool, dz: f64) -> Derivs {
    let n = phi.len();
    let nz = phi.iter().flatten().map(|l| l.len()).next().unwrap_or(0);
    let (mut grad, mut hess) = (0.0f64, 0.0f64);
    let mut zz = vec![None; n];
    let total = if closed && n > 1 { y[n - 1] - y[0] + (y[1] - y[0]) } else { 0.0 };
    let nbr = |i: usize, d: isize| -> Option<(usize, f64)> {
        let j = i as isize + d;
        if (0..n as isize).contains(&j) {
            let j = j as usize;
            Some((j, y[j] - y[i]))
        } else if closed {
            let j = j.rem_euclid(n as isize) as usize;
            Some((j, y[j] - y[i] + d.signum() as f64 * total))
        } else {
            None
        }
    };
    for i in 0..n {
        let Some(l) = &phi[i] else { continue };
        let mut line_zz = vec![0.0; nz];
        for k in 1..nz.saturating_sub(1) {
            let dzv = (l[k + 1] - l[k - 1]) / (2.0 * dz);
            let dzz = (l[k + 1] - 2.0 * l[k] + l[k - 1]) / (dz * dz);
            line_zz[k] = dzz;
            grad = grad.max(dzv.abs());
            hess = hess.max(dzz.abs());
        }
        zz[i] = Some(line_zz);
        if let (Some((a, ha)), Some((b, hb))) = (nbr(i, -1), nbr(i, 1)) {
            if let (Some(la), Some(lb)) = (&phi[a], &phi[b]) {
                let (ha, hb) = (-ha, hb);
                for k in 0..nz {
                    let dy = (lb[k] - la[k]) / (ha + hb);
                    let dyy = 2.0 * (hb * la[k] - (ha + hb) * l[k] + ha * lb[k]) / (ha * hb * (ha + hb));
                    grad = grad.max(dy.abs());
                    hess = hess.max(dyy.abs());
                    if k > 0 && k + 1 < nz {
                        let dyz = ((lb[k + 1] - lb[k - 1]) - (la[k + 1] - la[k - 1])) / (2.0 * dz * (ha + hb));
                        hess = hess.max(dyz.abs());
                    }
                }
            }
        }
    }
    Derivs { grad, hess, zz }
}

/// Index of the vertex at the nearest normalized arclength fraction.
fn matching_vertex(y_from: &[f64], y_to: &[f64], i: usize) -> usize {
    let frac = |y: &[f64], v: f64| {
        let span = y[y.len() - 1] - y[0];
        if span > 0.0 { (v - y[0]) / span } else { 0.0 }
    };
    let f = frac(y_from, y_from[i]);
    let mut best = 0;
    for j in 0..y_to.len() {
        if (frac(y_to, y_to[j]) - f).abs() < (frac(y_to, y_to[best]) - f).abs() {
            best = j;
        }
    }
    best
}

/// Norms of `φ = u − g*` over a sequence of snapshots. `eps` converts time
/// to rescaled units `t/ε²`; vertices of consecutive snapshots are matched by
/// normalized arclength.
pub fn phi_report(u: &[NormalSamples], gstar: &[NormalSamples], eps: f64, theta: f64) -> Result<PhiReport> {
    if u.is_empty() || u.len() != gstar.len() {
        return invalid("phi_report needs matching, nonempty sample sequences");
    }
    for (a, b) in u.iter().zip(gstar) {
        if a.z != b.z || a.values.len() != b.values.len() {
            return invalid("u and g* must share normal lines");
        }
    }
    let phis: Vec<Vec<Option<Vec<f64>>>> = u.iter().zip(gstar).map(|(a, b)| difference(a, b)).collect();
    let mut rep = PhiReport { sup_norm: 0.0, grad_sup: 0.0, hess_sup: 0.0, time_deriv_sup: 0.0, holder_c2theta: 0.0 };
    let mut holder = Vec::new();
    for (t, phi) in phis.iter().enumerate() {
        let s = &u[t];
        for l in phi.iter().flatten() {
            rep.sup_norm = l.iter().fold(rep.sup_norm, |m, v| m.max(v.abs()));
        }
        let d = spatial(phi, &s.y, s.closed, s.dz());
        rep.grad_sup = rep.grad_sup.max(d.grad);
        rep.hess_sup = rep.hess_sup.max(d.hess);
        let stride = (phi.len() / HOLDER_VERTICES).max(1);
        let tr = s.time / (eps * eps);
        for i in (0..phi.len()).step_by(stride) {
            if let Some(l) = &d.zz[i] {
                for k in (1..l.len().saturating_sub(1)).step_by(HOLDER_Z_STRIDE) {
                    holder.push(HolderSample { point: [s.y[i], s.z[k]], time: tr, value: l[k] });
                }
            }
        }
        if t + 1 < phis.len() {
            let next = &phis[t + 1];
            let dt = (u[t + 1].time - s.time) / (eps * eps);
            for (i, l) in phi.iter().enumerate() {
                let j = matching_vertex(&s.y, &u[t + 1].y, i);
                if let (Some(a), Some(b)) = (l, &next[j]) {
                    for (x, y) in a.iter().zip(b) {
                        rep.time_deriv_sup = rep.time_deriv_sup.max(((y - x) / dt).abs());
                    }
                }
            }
        }
    }
    let min_sep = 2.0 * u[0].dz();
    if holder.len() >= 2 {
        rep.holder_c2theta = parabolic_holder_seminorm(&holder, theta, min_sep).unwrap_or(0.0);
    }
    Ok(rep)
}
