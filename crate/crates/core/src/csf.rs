//! Exact and front-tracking curve shortening flow, used as the reference
//! motion for nodal sets.

use rayon::prelude::*;

use crate::diagnostics::{entropy_search, EntropyResult, GaussianMeasure, SearchSpec};
use crate::error::invalid;
use crate::geometry::{polyline_curvature, Polyline};
use crate::numerics::SplineCurve;
use crate::{Error, Result};

/// Segment-length ratio that triggers arclength reparametrization.
pub const REPARAM_RATIO: f64 = 4.0;
/// Largest allowed `max|κ|·dt`.
pub const MAX_CURVATURE_STEP: f64 = 0.1;

/// Radius `√(r0² − 2t)` of a shrinking circle; `None` once extinct (`t ≥ r0²/2`).
pub fn circle_exact(r0: f64, t: f64) -> Result<Option<f64>> {
    if !(r0 > 0.0) {
        return invalid(format!("r0 must be positive, got {r0}"));
    }
    let r2 = r0 * r0 - 2.0 * t;
    Ok((r2 > 0.0).then(|| r2.sqrt()))
}

/// Height `t − log cos x` of the unit-speed upward translator.
pub fn grim_reaper(x: f64, t: f64) -> Result<f64> {
    if !(x.abs() < std::f64::consts::FRAC_PI_2) {
        return invalid(format!("grim reaper needs |x| < pi/2, got {x}"));
    }
    Ok(t - x.cos().ln())
}

#[derive(Debug, Clone)]
pub struct CsfState {
    pub curve: Polyline,
    pub time: f64,
}

impl CsfState {
    pub fn new(curve: Polyline, time: f64) -> Self {
        Self { curve, time }
    }
}

/// Moves every vertex by `κ·dt` along its left normal (inward on a
/// counterclockwise curve); endpoints of open curves stay fixed. Resamples
/// uniformly in arclength once the segment-length ratio exceeds 4.
pub fn front_tracking_step(s: &CsfState, dt: f64) -> Result<CsfState> {
    let c = &s.curve;
    let seg = c.segment_lengths();
    let min_seg = seg.iter().copied().fold(f64::INFINITY, f64::min);
    if !(dt > 0.0) || dt > 0.5 * min_seg * min_seg {
        return invalid(format!("dt = {dt} must lie in (0, min segment^2/2 = {}]", 0.5 * min_seg * min_seg));
    }
    let geo = polyline_curvature(c);
    let kmax = geo.curvature.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    if kmax * dt > MAX_CURVATURE_STEP {
        return Err(Error::CurvatureBlowUp(kmax * dt));
    }
    let n = c.len();
    let moved: Vec<[f64; 2]> = c
        .vertices()
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            if !c.closed() && (i == 0 || i + 1 == n) {
                return *p;
            }
            let (k, nl) = (geo.curvature[i], geo.normals[i]);
            [p[0] + k * dt * nl[0], p[1] + k * dt * nl[1]]
        })
        .collect();
    let next = Polyline::new(moved, c.closed())?;
    let lens = next.segment_lengths();
    let (lo, hi) = lens.iter().fold((f64::INFINITY, 0.0f64), |(a, b), l| (a.min(*l), b.max(*l)));
    let curve = if hi > REPARAM_RATIO * lo {
        let spline = SplineCurve::through(next.vertices(), next.closed());
        let m = if next.closed() { n } else { n - 1 };
        let mut v = spline.resample_uniform(m);
        if !next.closed() {
            v.push(*next.vertices().last().expect("non-empty"));
        }
        Polyline::new(v, next.closed())?
    } else {
        next
    };
    Ok(CsfState { curve, time: s.time + dt })
}

/// Steps until `t_end` with the largest step `≤ dt` dividing the span evenly;
/// keeps the initial state, every `record_every`-th step and the final state.
pub fn evolve(s: &CsfState, dt: f64, t_end: f64, record_every: usize) -> Result<Vec<CsfState>> {
    let span = t_end - s.time;
    if span < 0.0 || record_every == 0 {
        return invalid("evolve needs t_end >= start and record_every >= 1");
    }
    let n = if span == 0.0 { 0 } else { (span / dt - 1e-9).ceil().max(1.0) as usize };
    let h = if n == 0 { dt } else { span / n as f64 };
    let mut out = vec![s.clone()];
    let mut cur = s.clone();
    for k in 1..=n {
        cur = front_tracking_step(&cur, h)?;
        cur.time = s.time + k as f64 * h;
        if k % record_every == 0 || k == n {
            out.push(cur.clone());
        }
    }
    Ok(out)
}

/// A polyline as a measure for the Gaussian density, integrated exactly per segment.
pub struct CurveMeasure<'a> {
    pub curve: &'a Polyline,
}

impl CurveMeasure<'_> {
    fn density(&self, y: [f64; 2], s: f64) -> f64 {
        let w = (4.0 * s).sqrt();
        let mut acc = 0.0;
        for k in 0..self.curve.segment_count() {
            let (a, b) = self.curve.segment(k);
            let e = [b[0] - a[0], b[1] - a[1]];
            let l = e[0].hypot(e[1]);
            let t = [e[0] / l, e[1] / l];
            let ay = [a[0] - y[0], a[1] - y[1]];
            let t0 = -(ay[0] * t[0] + ay[1] * t[1]);
            let perp = ay[0] * t[1] - ay[1] * t[0];
            acc += 0.5 * (-perp * perp / (w * w)).exp() * (libm::erf((l - t0) / w) - libm::erf(-t0 / w));
        }
        acc
    }
}

impl GaussianMeasure for CurveMeasure<'_> {
    fn bounds(&self) -> [[f64; 2]; 2] {
        let v = self.curve.vertices();
        let lo = v.iter().fold([f64::INFINITY; 2], |m, p| [m[0].min(p[0]), m[1].min(p[1])]);
        let hi = v.iter().fold([f64::NEG_INFINITY; 2], |m, p| [m[0].max(p[0]), m[1].max(p[1])]);
        [lo, hi]
    }

    fn probe_grid(&self, cx: &[f64], cy: &[f64], s: f64) -> Vec<f64> {
        cy.iter().flat_map(|&y| cx.iter().map(move |&x| self.density([x, y], s))).collect()
    }

    /// The curve is the whole measure, so nothing leaks.
    fn leakage(&self, _y: [f64; 2], _s: f64) -> f64 {
        0.0
    }

    fn default_scales(&self) -> [f64; 2] {
        let seg = self.curve.segment_lengths().into_iter().fold(0.0, f64::max);
        let [lo, hi] = self.bounds();
        let side = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        [(2.0 * seg).powi(2), (side / 2.0).powi(2).max((4.0 * seg).powi(2))]
    }
}

/// `sup_{y,s} ∫_c (4πs)^{−1/2} e^{−|x−y|²/4s} ds(x)` with the entropy probe-and-refine search.
pub fn csf_entropy(c: &Polyline, search: &SearchSpec) -> Result<EntropyResult> {
    entropy_search(&CurveMeasure { curve: c }, search)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2, PI};

    #[test]
    fn circle_law() {
        assert_eq!(circle_exact(0.5, 0.0).unwrap(), Some(0.5));
        assert!((circle_exact(0.5, 0.05).unwrap().unwrap() - 0.38730).abs() < 1e-5);
        assert_eq!(circle_exact(0.5, 0.125).unwrap(), None);
        assert!(circle_exact(0.0, 0.0).is_err());
    }

    #[test]
    fn grim_reaper_values() {
        assert_eq!(grim_reaper(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(grim_reaper(0.0, 1.0).unwrap(), 1.0);
        assert!((grim_reaper(PI / 3.0, 0.0).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!(grim_reaper(FRAC_PI_2, 0.0).is_err());
    }

    fn mean_radius(c: &Polyline) -> f64 {
        c.vertices().iter().map(|p| p[0].hypot(p[1])).sum::<f64>() / c.len() as f64
    }

    #[test]
    fn tracked_circle_follows_exact_law() {
        let c = Polyline::circle([0.0, 0.0], 0.5, 256).unwrap();
        let run = evolve(&CsfState::new(c, 0.0), 1e-5, 0.05, 100).unwrap();
        let last = run.last().unwrap();
        assert!((last.time - 0.05).abs() < 1e-12);
        assert!((mean_radius(&last.curve) - 0.15f64.sqrt()).abs() < 1e-3);
        for w in run.windows(2) {
            assert!(w[1].curve.length() < w[0].curve.length() + 1e-10);
            let rate = (w[1].curve.signed_area() - w[0].curve.signed_area()) / (w[1].time - w[0].time);
            assert!((rate + 2.0 * PI).abs() < 0.01 * 2.0 * PI, "{rate}");
        }
    }

    #[test]
    fn radius_error_is_first_order_in_dt() {
        let c = Polyline::circle([0.0, 0.0], 0.5, 128).unwrap();
        let err = |dt: f64| {
            let run = evolve(&CsfState::new(c.clone(), 0.0), dt, 0.05, usize::MAX).unwrap();
            (mean_radius(&run.last().unwrap().curve) - 0.15f64.sqrt()).abs()
        };
        let (a, b, d) = (err(1e-4), err(5e-5), err(2.5e-5));
        assert!((a / b - 2.0).abs() < 0.2 && (b / d - 2.0).abs() < 0.2, "{a} {b} {d}");
    }

    #[test]
    fn straight_chain_is_fixed() {
        let c = Polyline::new((0..10).map(|i| [0.1 * i as f64, 0.05 * i as f64]).collect(), false).unwrap();
        let s = front_tracking_step(&CsfState::new(c.clone(), 0.0), 1e-4).unwrap();
        for (p, q) in s.curve.vertices().iter().zip(c.vertices()) {
            assert!((p[0] - q[0]).abs() < 1e-15 && (p[1] - q[1]).abs() < 1e-15);
        }
    }

    fn eccentricity(c: &Polyline) -> f64 {
        // Second area moments by Green's theorem over the polygon.
        let v = c.vertices();
        let n = v.len();
        let (mut a, mut cx, mut cy, mut ixx, mut iyy, mut ixy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let (p, q) = (v[i], v[(i + 1) % n]);
            let cr = p[0] * q[1] - q[0] * p[1];
            a += cr / 2.0;
            cx += (p[0] + q[0]) * cr / 6.0;
            cy += (p[1] + q[1]) * cr / 6.0;
            ixx += (p[1] * p[1] + p[1] * q[1] + q[1] * q[1]) * cr / 12.0;
            iyy += (p[0] * p[0] + p[0] * q[0] + q[0] * q[0]) * cr / 12.0;
            ixy += (p[0] * q[1] + 2.0 * p[0] * p[1] + 2.0 * q[0] * q[1] + q[0] * p[1]) * cr / 24.0;
        }
        let (cx, cy) = (cx / a, cy / a);
        let sxx = iyy / a - cx * cx;
        let syy = ixx / a - cy * cy;
        let sxy = ixy / a - cx * cy;
        let m = 0.5 * (sxx + syy);
        let d = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
        (1.0 - (m - d) / (m + d)).sqrt()
    }

    #[test]
    fn ellipse_becomes_rounder() {
        let v = (0..256)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 256.0;
                [0.5 * t.cos(), 0.25 * t.sin()]
            })
            .collect();
        let mut s = CsfState::new(Polyline::new(v, true).unwrap(), 0.0);
        let e0 = eccentricity(&s.curve);
        assert!((e0 - 0.75f64.sqrt()).abs() < 1e-3);
        let mut prev = e0;
        for _ in 0..100 {
            s = front_tracking_step(&s, 1e-5).unwrap();
            let e = eccentricity(&s.curve);
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn step_size_guards() {
        let c = Polyline::circle([0.0, 0.0], 0.01, 16).unwrap();
        let s = CsfState::new(c, 0.0);
        assert!(front_tracking_step(&s, 1.0).is_err());
        let corner = Polyline::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], false).unwrap();
        let r = front_tracking_step(&CsfState::new(corner, 0.0), 0.4);
        assert!(matches!(r, Err(Error::CurvatureBlowUp(_))), "{r:?}");
    }

    #[test]
    fn line_entropy_is_one() {
        let c = Polyline::new((0..=200).map(|i| [-10.0 + 0.1 * i as f64, 0.0]).collect(), false).unwrap();
        let e = csf_entropy(&c, &SearchSpec::default()).unwrap();
        assert!((e.value - 1.0).abs() < 0.01, "{e:?}");
    }

    #[test]
    fn circle_entropy() {
        let c = Polyline::circle([0.0, 0.0], 0.5, 512).unwrap();
        let e = csf_entropy(&c, &SearchSpec::default()).unwrap();
        let want = (2.0 * PI / E).sqrt();
        assert!((e.value - want).abs() < 0.01 * want, "{e:?}");
    }

    #[test]
    fn grim_reaper_entropy_approaches_two() {
        let xm = FRAC_PI_2 - 0.05;
        let top = 100.0;
        let y_end = grim_reaper(xm, 0.0).unwrap();
        let mut v: Vec<[f64; 2]> = (0..=40).rev().map(|k| [xm, y_end + (top - y_end) * k as f64 / 40.0]).collect();
        v.pop();
        v.extend((0..=400).map(|k| {
            let x = xm - 2.0 * xm * k as f64 / 400.0;
            [x, grim_reaper(x, 0.0).unwrap()]
        }));
        v.extend((1..=40).map(|k| [-xm, y_end + (top - y_end) * k as f64 / 40.0]));
        let c = Polyline::new(v, false).unwrap();
        let e = csf_entropy(&c, &SearchSpec::default()).unwrap();
        assert!((e.value - 2.0).abs() < 0.2, "{e:?}");
    }
}
