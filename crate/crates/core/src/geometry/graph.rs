use rayon::prelude::*;

use super::{cross, polyline_curvature, sub, Polyline};
use crate::{Error, Result};

/// A target curve written as normal offsets over a reference curve.
///
/// Offsets are measured along the right (outward for a counterclockwise
/// circle, `u > 0`) normal of the reference.
#[derive(Debug, Clone)]
pub struct GraphOverReference {
    pub reference: Polyline,
    pub normals: Vec<[f64; 2]>,
    pub offsets: Vec<f64>,
    pub valid: Vec<bool>,
}

impl GraphOverReference {
    pub fn miss_fraction(&self) -> f64 {
        self.valid.iter().filter(|v| !**v).count() as f64 / self.valid.len() as f64
    }

    /// Reference vertex moved by its offset; `None` where the ray missed.
    pub fn reconstruct(&self) -> Vec<Option<[f64; 2]>> {
        self.reference
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                self.valid[i].then(|| {
                    let (n, f) = (self.normals[i], self.offsets[i]);
                    [p[0] + f * n[0], p[1] + f * n[1]]
                })
            })
            .collect()
    }

    pub fn max_abs_offset(&self) -> f64 {
        self.offsets.iter().zip(&self.valid).filter(|(_, v)| **v).map(|(f, _)| f.abs()).fold(0.0, f64::max)
    }
}

/// Parameter `t` with `p + t·n` on segment `ab`, if the line crosses it.
fn ray_hit(p: [f64; 2], n: [f64; 2], a: [f64; 2], b: [f64; 2]) -> Option<f64> {
    let e = sub(b, a);
    let den = cross(n, e);
    if den == 0.0 {
        return None;
    }
    let ap = sub(a, p);
    let t = cross(ap, e) / den;
    let s = cross(ap, n) / den;
    (-1e-12..=1.0 + 1e-12).contains(&s).then_some(t)
}

/// Offsets of `target` over `reference` with rays limited to `|f| ≤ max_offset`.
pub fn graph_over_with(target: &Polyline, reference: &Polyline, max_offset: f64) -> Result<GraphOverReference> {
    let geo = polyline_curvature(reference);
    let normals: Vec<[f64; 2]> = geo.normals.iter().map(|n| [-n[0], -n[1]]).collect();
    let hits: Vec<Option<f64>> = reference
        .vertices()
        .par_iter()
        .zip(normals.par_iter())
        .map(|(p, n)| {
            (0..target.segment_count())
                .filter_map(|k| {
                    let (a, b) = target.segment(k);
                    ray_hit(*p, *n, a, b)
                })
                .filter(|t| t.abs() <= max_offset)
                .min_by(|x, y| x.abs().total_cmp(&y.abs()))
        })
        .collect();
    let valid: Vec<bool> = hits.iter().map(Option::is_some).collect();
    let offsets = hits.iter().map(|h| h.unwrap_or(0.0)).collect();
    let out = GraphOverReference { reference: reference.clone(), normals, offsets, valid };
    let miss = out.miss_fraction();
    if miss > 0.1 {
        return Err(Error::TooManyFailures {
            what: "graph rays".into(),
            failed: out.valid.iter().filter(|v| !**v).count(),
            total: out.valid.len(),
        });
    }
    if miss > 0.0 {
        log::warn!("graph_over: {:.1}% of normal rays missed the target", 100.0 * miss);
    }
    Ok(out)
}

/// [`graph_over_with`] with rays limited to half the reference's curvature radius.
pub fn graph_over(target: &Polyline, reference: &Polyline) -> Result<GraphOverReference> {
    let kmax = polyline_curvature(reference).curvature.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    let reach = if kmax > 0.0 { 1.0 / kmax } else { reference.length() };
    graph_over_with(target, reference, 0.5 * reach)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identical_curves_give_zero() {
        let c = Polyline::circle([0.0, 0.0], 0.5, 256).unwrap();
        let g = graph_over(&c, &c).unwrap();
        assert!(g.valid.iter().all(|v| *v));
        assert!(g.max_abs_offset() <= 1e-12);
    }

    #[test]
    fn concentric_circles() {
        let r = Polyline::circle([0.0, 0.0], 0.5, 256).unwrap();
        let t = Polyline::circle([0.0, 0.0], 0.45, 8192).unwrap();
        let g = graph_over(&t, &r).unwrap();
        assert!(g.offsets.iter().all(|f| (f + 0.05).abs() <= 1e-6));
    }

    #[test]
    fn translated_circle_matches_cosine() {
        let n = 256;
        let r = Polyline::circle([0.0, 0.0], 0.5, n).unwrap();
        let t = Polyline::circle([0.01, 0.0], 0.5, 8192).unwrap();
        let g = graph_over(&t, &r).unwrap();
        for (i, f) in g.offsets.iter().enumerate() {
            let th = 2.0 * PI * i as f64 / n as f64;
            assert!((f - 0.01 * th.cos()).abs() <= 2e-4);
        }
        for (q, p) in g.reconstruct().iter().zip(g.reference.vertices()) {
            let q = q.unwrap();
            let d = ((q[0] - 0.01).hypot(q[1]) - 0.5).abs();
            assert!(d < 1e-5, "{p:?}");
        }
    }

    #[test]
    fn too_many_misses_is_an_error() {
        let r = Polyline::new((0..=20).map(|i| [1.0 - 0.1 * i as f64, 0.0]).collect(), false).unwrap();
        let t = Polyline::new(vec![[0.1, 0.1], [-0.1, 0.1]], false).unwrap();
        assert!(matches!(graph_over(&t, &r), Err(Error::TooManyFailures { .. })));
    }
}
