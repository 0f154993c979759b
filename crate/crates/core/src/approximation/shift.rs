use rayon::prelude::*;

use super::NormalSamples;
use crate::diagnostics::DiagnosticsReport;
use crate::numerics::bracketed_root;
use crate::profile::CutoffProfile;
use crate::{Error, Result};

/// Root bracket `|h| ≤ 3`.
pub const H_BRACKET: f64 = 3.0;
/// Roots this close to the bracket edge are flagged.
pub const H_FLAG: f64 = 2.5;
/// Largest tolerated fraction of failed vertices.
pub const MAX_FAILURE_FRACTION: f64 = 0.05;

/// Per-vertex optimal shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftField {
    /// `NaN` where the root solve failed.
    pub h: Vec<f64>,
    /// `|∫(u − ḡ(z−h))ḡ′(z−h)dz| / ∫ḡ′²`
    pub residual: Vec<f64>,
    pub failed: Vec<bool>,
    /// Root within `H_FLAG` of the bracket edge.
    pub flagged: Vec<bool>,
    pub eps_eff: f64,
}

impl ShiftField {
    pub fn max_abs(&self) -> f64 {
        self.h.iter().filter(|h| !h.is_nan()).fold(0.0, |m, h| m.max(h.abs()))
    }

    /// Rows `h` and `h-residual` per vertex, with `arg1 = time` and `arg2 = vertex`.
    pub fn to_report(&self, scenario: &str, eps: f64, time: f64) -> DiagnosticsReport {
        let mut r = DiagnosticsReport::new();
        for (i, (h, res)) in self.h.iter().zip(&self.residual).enumerate() {
            r.push(scenario, eps, "h", *h, Some(time), Some(i as f64));
            r.push(scenario, eps, "h-residual", *res, Some(time), Some(i as f64));
        }
        r
    }

    /// Largest residual over vertices that neither failed nor were flagged.
    pub fn max_residual(&self) -> f64 {
        (0..self.h.len())
            .filter(|&i| !self.failed[i] && !self.flagged[i])
            .map(|i| self.residual[i])
            .fold(0.0, f64::max)
    }
}

fn trapezoid(dz: f64, f: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = f.collect();
    let n = v.len();
    dz * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[n - 1]))
}

/// `F(h) = ∫ (u(z) − ḡ(z−h)) ḡ′(z−h) dz` by the trapezoid rule.
fn orthogonality(p: &CutoffProfile, z: &[f64], u: &[f64], h: f64) -> f64 {
    trapezoid(z[1] - z[0], z.iter().zip(u).map(|(&zk, &uk)| {
        let g = p.eval_all(zk - h);
        (uk - g[0]) * g[1]
    }))
}

/// Solves `F(h) = 0` on every normal line by bisection on `[−3, 3]` and a secant step.
pub fn solve_optimal_shift(u: &NormalSamples, eps_eff: f64) -> Result<ShiftField> {
    let p = CutoffProfile::new(eps_eff)?;
    let z = &u.z;
    let norm = trapezoid(u.dz(), z.iter().map(|&zk| p.eval_all(zk)[1].powi(2)));
    let out: Vec<(f64, f64, bool)> = u
        .values
        .par_iter()
        .map(|line| {
            let Some(line) = line else { return (f64::NAN, f64::NAN, true) };
            let f = |h: f64| orthogonality(&p, z, line, h);
            match bracketed_root(&f, -H_BRACKET, H_BRACKET, 1e-14) {
                Some(h) => (h, f(h).abs() / norm, false),
                None => (f64::NAN, f64::NAN, true),
            }
        })
        .collect();
    let failed: Vec<bool> = out.iter().map(|o| o.2).collect();
    let nfail = failed.iter().filter(|f| **f).count();
    if nfail as f64 > MAX_FAILURE_FRACTION * failed.len() as f64 {
        return Err(Error::TooManyFailures { what: "optimal shift", failed: nfail, total: failed.len() });
    }
    let h: Vec<f64> = out.iter().map(|o| o.0).collect();
    let flagged = h.iter().map(|h| h.abs() > H_FLAG).collect();
    Ok(ShiftField { h, residual: out.iter().map(|o| o.1).collect(), failed, flagged, eps_eff })
}

/// `g*(y, z) = ḡ(z − h(y))` on the normal lines of `like`; failed vertices stay `None`.
pub fn build_gstar(like: &NormalSamples, shift: &ShiftField) -> Result<NormalSamples> {
    let p = CutoffProfile::new(shift.eps_eff)?;
    let values = shift
        .h
        .iter()
        .zip(&shift.failed)
        .map(|(h, failed)| (!failed).then(|| like.z.iter().map(|z| p.eval_all(z - h)[0]).collect()))
        .collect();
    Ok(NormalSamples { values, ..like.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lines(eps: f64, n: usize, f: impl Fn(&CutoffProfile, f64) -> f64) -> NormalSamples {
        let p = CutoffProfile::new(eps).unwrap();
        let z = NormalSamples::grid_for(6.0 * eps.ln().abs());
        let line: Vec<f64> = z.iter().map(|&zk| f(&p, zk)).collect();
        NormalSamples { y: (0..n).map(|i| i as f64).collect(), z, closed: false, values: vec![Some(line); n], time: 0.0 }
    }

    #[test]
    fn exact_translates() {
        for h0 in [0.0, 0.3, -1.7] {
            let u = lines(0.05, 3, |p, z| p.eval_all(z - h0)[0]);
            let s = solve_optimal_shift(&u, 0.05).unwrap();
            assert!(s.h.iter().all(|h| (h - h0).abs() < 1e-8), "{h0}: {:?}", s.h);
            assert!(s.max_residual() <= 1e-8);
            let g = build_gstar(&u, &s).unwrap();
            assert_eq!(g.values.len(), 3);
            for (a, b) in g.values[0].as_ref().unwrap().iter().zip(u.values[0].as_ref().unwrap()) {
                assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn gstar_vanishes_at_the_shift() {
        let u = lines(0.05, 1, |p, z| p.eval_all(z - 0.3)[0]);
        let s = ShiftField { h: vec![0.3], residual: vec![0.0], failed: vec![false], flagged: vec![false], eps_eff: 0.05 };
        let like = NormalSamples { z: vec![-0.2, 0.3, 0.8], ..u };
        let g = build_gstar(&like, &s).unwrap();
        assert_eq!(g.values[0].as_ref().unwrap()[1], 0.0);
    }

    #[test]
    fn derivative_perturbation_moves_root_by_minus_coefficient() {
        // ḡ(z − h) ≈ ḡ − hḡ′, so u = ḡ + 0.01ḡ′ is matched by h ≈ −0.01.
        let u = lines(0.05, 1, |p, z| {
            let g = p.eval_all(z);
            g[0] + 0.01 * g[1]
        });
        let s = solve_optimal_shift(&u, 0.05).unwrap();
        // Brute-force oracle: sign change of F on a fine h-grid.
        let p = CutoffProfile::new(0.05).unwrap();
        let line = u.values[0].as_ref().unwrap();
        let grid: Vec<f64> = (0..=2000).map(|k| -0.05 + 1e-4 * k as f64 * 0.5).collect();
        let root = grid
            .windows(2)
            .find(|w| orthogonality(&p, &u.z, line, w[0]).signum() != orthogonality(&p, &u.z, line, w[1]).signum())
            .map(|w| 0.5 * (w[0] + w[1]))
            .unwrap();
        assert!((s.h[0] - root).abs() < 1e-4);
        assert!((s.h[0] + 0.01).abs() < 1e-3, "{}", s.h[0]);
    }

    #[test]
    fn failures_are_counted() {
        let mut u = lines(0.05, 10, |_, _| 1.0);
        assert!(matches!(solve_optimal_shift(&u, 0.05), Err(Error::TooManyFailures { .. })));
        u = lines(0.05, 40, |p, z| p.eval_all(z)[0]);
        u.values[3] = None;
        let s = solve_optimal_shift(&u, 0.05).unwrap();
        assert!(s.failed[3] && s.h[3].is_nan());
        assert_eq!(s.failed.iter().filter(|f| **f).count(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn shift_is_translation_equivariant(h0 in -1.0..1.0f64, d in -0.5..0.5f64) {
            let f = |p: &CutoffProfile, z: f64| {
                let g = p.eval_all(z - h0);
                g[0] + 0.02 * g[1] + 0.01 * g[2]
            };
            let a = solve_optimal_shift(&lines(0.05, 1, f), 0.05).unwrap();
            let b = solve_optimal_shift(&lines(0.05, 1, |p, z| f(p, z - d)), 0.05).unwrap();
            prop_assert!((b.h[0] - a.h[0] - d).abs() < 1e-6);
        }
    }
}
