use rayon::prelude::*;

use crate::field::{sample, Interp, ScalarField};
use crate::geometry::{point_segment_distance, polyline_curvature_span, segments_touch, Polyline};
use crate::{Error, Result};

/// Normal-line samples per unit of profile length.
pub const SAMPLES_PER_UNIT: f64 = 4.0;

/// Reference curve with right unit normals and a normal extent `z_max` (profile units).
#[derive(Debug, Clone)]
pub struct FermiFrame {
    pub reference: Polyline,
    pub normals: Vec<[f64; 2]>,
    /// Arclength of each vertex divided by `eps`.
    pub y: Vec<f64>,
    /// Length scale converting profile units to positions.
    pub eps: f64,
    pub z_max: f64,
}

fn full_extent(eps: f64) -> f64 {
    6.0 * eps.ln().abs()
}

impl FermiFrame {
    /// Extent `min(6|log ε|, 0.8·reach/ε)`, shrunk by 0.8 until no two normal segments cross.
    pub fn new(reference: &Polyline, eps: f64) -> Result<Self> {
        let geo = polyline_curvature_span(reference, 4.0 * eps);
        let kmax = geo.curvature.iter().fold(0.0f64, |m, k| m.max(k.abs()));
        let mut z = full_extent(eps);
        if kmax > 0.0 {
            z = z.min(0.8 / (kmax * eps));
        }
        let mut f = Self::build(reference, eps, z, geo.normals, geo.arclength);
        let mut tries = 0;
        while let Some((i, j)) = f.crossing() {
            tries += 1;
            if tries > 40 {
                return Err(Error::InvalidArgument(format!("normal lines {i} and {j} cross at every extent tried")));
            }
            f.z_max *= 0.8;
        }
        if f.z_max < full_extent(eps) {
            log::info!("Fermi frame extent truncated to {:.3} (full cutoff support {:.3})", f.z_max, full_extent(eps));
        }
        Ok(f)
    }

    /// Fixed extent; errors when normal segments cross.
    pub fn with_extent(reference: &Polyline, eps: f64, z_max: f64) -> Result<Self> {
        let geo = polyline_curvature_span(reference, 4.0 * eps);
        let f = Self::build(reference, eps, z_max, geo.normals, geo.arclength);
        match f.crossing() {
            Some((i, j)) => Err(Error::InvalidArgument(format!("normal lines {i} and {j} cross within |z| <= {z_max}"))),
            None => Ok(f),
        }
    }

    fn build(reference: &Polyline, eps: f64, z_max: f64, left: Vec<[f64; 2]>, s: Vec<f64>) -> Self {
        Self {
            reference: reference.clone(),
            normals: left.iter().map(|n| [-n[0], -n[1]]).collect(),
            y: s.iter().map(|v| v / eps).collect(),
            eps,
            z_max,
        }
    }

    pub fn point(&self, i: usize, z: f64) -> [f64; 2] {
        let (c, n) = (self.reference.vertices()[i], self.normals[i]);
        [c[0] + self.eps * z * n[0], c[1] + self.eps * z * n[1]]
    }

    /// First pair of normal segments that cross.
    pub fn crossing(&self) -> Option<(usize, usize)> {
        let n = self.reference.len();
        let segs: Vec<([f64; 2], [f64; 2])> = (0..n).map(|i| (self.point(i, -self.z_max), self.point(i, self.z_max))).collect();
        (0..n).into_par_iter().find_map_first(|i| {
            (i + 1..n)
                .find(|&j| segments_touch(segs[i].0, segs[i].1, segs[j].0, segs[j].1))
                .map(|j| (i, j))
        })
    }
}

/// Nearest vertex and signed offset (position units, positive on the right);
/// `None` outside `|z| ≤ z_max·eps`.
pub fn fermi_coordinates(frame: &FermiFrame, p: [f64; 2]) -> Option<(usize, f64)> {
    let c = &frame.reference;
    let mut best = (0, f64::INFINITY, 0.0);
    for k in 0..c.segment_count() {
        let (a, b) = c.segment(k);
        let (d, t) = point_segment_distance(p, a, b);
        if d < best.1 {
            best = (k, d, t);
        }
    }
    let (k, d, t) = best;
    let (a, b) = c.segment(k);
    let side = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let z = if side > 0.0 { -d } else { d };
    if z.abs() > frame.z_max * frame.eps {
        return None;
    }
    let vertex = if t < 0.5 { k } else { (k + 1) % c.len() };
    Some((vertex, z))
}

/// Values on the normal lines of a frame, at `z_k = −z_max + k·dz` (profile units).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalSamples {
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub closed: bool,
    /// `values[i][k]` at vertex `i`, offset `z[k]`; `None` where a line leaves the domain.
    pub values: Vec<Option<Vec<f64>>>,
    pub time: f64,
}

impl NormalSamples {
    pub fn dz(&self) -> f64 {
        self.z[1] - self.z[0]
    }

    pub(crate) fn grid_for(z_max: f64) -> Vec<f64> {
        let n = (z_max * SAMPLES_PER_UNIT).floor() as usize;
        let dz = 1.0 / SAMPLES_PER_UNIT;
        (0..=2 * n).map(|k| (k as f64 - n as f64) * dz).collect()
    }
}

/// Samples `u` along every normal line with 6-point Lagrange interpolation.
pub fn sample_normal_lines(u: &ScalarField, frame: &FermiFrame) -> NormalSamples {
    let z = NormalSamples::grid_for(frame.z_max);
    let values = (0..frame.reference.len())
        .into_par_iter()
        .map(|i| z.iter().map(|&zk| sample(u.grid(), u.values(), frame.point(i, zk), Interp::Lagrange(6))).collect())
        .collect();
    NormalSamples { z, y: frame.y.clone(), closed: frame.reference.closed(), values, time: u.time() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Boundary, GridSpec};

    #[test]
    fn circle_coordinates() {
        let c = Polyline::circle([0.0, 0.0], 0.5, 512).unwrap();
        let f = FermiFrame::new(&c, 0.05).unwrap();
        let (_, z) = fermi_coordinates(&f, [0.55, 0.0]).unwrap();
        assert!((z - 0.05).abs() < 1e-3);
        let (_, z) = fermi_coordinates(&f, [0.0, 0.5]).unwrap();
        assert!(z.abs() < 1e-3);
        assert!(fermi_coordinates(&f, [1.0, 1.0]).is_none());
    }

    #[test]
    fn extent_respects_reach() {
        let c = Polyline::circle([0.0, 0.0], 0.5, 256).unwrap();
        let f = FermiFrame::new(&c, 0.05).unwrap();
        assert!((f.z_max - 0.8 * 0.5 / 0.05).abs() < 0.05);
        assert!(f.crossing().is_none());
        assert!(FermiFrame::with_extent(&c, 0.05, 12.0).is_err());
        let f = FermiFrame::new(&c, 0.005).unwrap();
        assert!((f.z_max - 6.0 * 0.005f64.ln().abs()).abs() < 1e-12);
    }

    #[test]
    fn samples_follow_the_field() {
        let g = GridSpec::new(64, 64, [-1.0, -1.0], [1.0, 1.0], Boundary::Periodic).unwrap();
        let u = ScalarField::from_fn(g, 0.0, |x, y| x.hypot(y) * 0.0 + 0.25 * x).unwrap();
        let c = Polyline::circle([0.0, 0.0], 0.5, 64).unwrap();
        let f = FermiFrame::with_extent(&c, 0.05, 4.0).unwrap();
        let s = sample_normal_lines(&u, &f);
        assert_eq!(s.z.len(), 33);
        for (i, line) in s.values.iter().enumerate() {
            let line = line.as_ref().unwrap();
            for (k, v) in line.iter().enumerate() {
                let p = f.point(i, s.z[k]);
                assert!((v - 0.25 * p[0]).abs() < 1e-12);
            }
        }
    }
}
