use std::f64::consts::PI;

use super::{cross, dist, sub};
use crate::{Error, Result};

/// Ordered planar vertices, open or closed, without self-intersections.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<[f64; 2]>,
    closed: bool,
}

impl Polyline {
    pub fn new(vertices: Vec<[f64; 2]>, closed: bool) -> Result<Self> {
        let min = if closed { 3 } else { 2 };
        if vertices.len() < min {
            return Err(Error::InvalidArgument(format!(
                "{} polyline needs {min} vertices, got {}",
                if closed { "closed" } else { "open" },
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::InvalidArgument("non-finite vertex".into()));
        }
        let p = Self { vertices, closed };
        let n = p.segment_count();
        for k in 0..n {
            let (a, b) = p.segment(k);
            if a == b {
                return Err(Error::InvalidArgument(format!("repeated vertex at {k}")));
            }
        }
        if let Some((i, j)) = p.find_self_intersection() {
            return Err(Error::SelfIntersecting(i, j));
        }
        Ok(p)
    }

    /// Skips the intersection scan; for curves simple by construction.
    pub(crate) fn new_unchecked(vertices: Vec<[f64; 2]>, closed: bool) -> Self {
        Self { vertices, closed }
    }

    /// Counterclockwise regular `n`-gon inscribed in the circle.
    pub fn circle(center: [f64; 2], r: f64, n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|k| {
                    let a = 2.0 * PI * k as f64 / n as f64;
                    [center[0] + r * a.cos(), center[1] + r * a.sin()]
                })
                .collect(),
            true,
        )
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    pub fn segment(&self, k: usize) -> ([f64; 2], [f64; 2]) {
        (self.vertices[k], self.vertices[(k + 1) % self.vertices.len()])
    }

    pub fn length(&self) -> f64 {
        (0..self.segment_count()).map(|k| {
            let (a, b) = self.segment(k);
            dist(a, b)
        }).sum()
    }

    /// Shoelace area; positive for counterclockwise closed curves.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|k| cross(self.vertices[k], self.vertices[(k + 1) % n]))
            .sum::<f64>()
    }

    pub fn centroid_of_vertices(&self) -> [f64; 2] {
        let n = self.vertices.len() as f64;
        let s = self.vertices.iter().fold([0.0, 0.0], |a, v| [a[0] + v[0], a[1] + v[1]]);
        [s[0] / n, s[1] / n]
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self { vertices: v, closed: self.closed }
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        (0..self.segment_count())
            .map(|k| {
                let (a, b) = self.segment(k);
                dist(a, b)
            })
            .collect()
    }

    /// First pair of non-adjacent segments that touch, found by an x-sorted sweep.
    pub fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.segment_count();
        let nv = self.vertices.len();
        let boxes: Vec<[f64; 4]> = (0..n)
            .map(|k| {
                let (a, b) = self.segment(k);
                [a[0].min(b[0]), a[0].max(b[0]), a[1].min(b[1]), a[1].max(b[1])]
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| boxes[i][0].total_cmp(&boxes[j][0]));
        for (oi, &i) in order.iter().enumerate() {
            for &j in &order[oi + 1..] {
                if boxes[j][0] > boxes[i][1] {
                    break;
                }
                if boxes[j][2] > boxes[i][3] || boxes[j][3] < boxes[i][2] {
                    continue;
                }
                let (lo, hi) = (i.min(j), i.max(j));
                let adjacent = hi == lo + 1 || (self.closed && lo == 0 && hi == nv - 1);
                let (a, b) = self.segment(i);
                let (c, d) = self.segment(j);
                if adjacent {
                    if overlap_adjacent(a, b, c, d) {
                        return Some((lo, hi));
                    }
                } else if segments_touch(a, b, c, d) {
                    return Some((lo, hi));
                }
            }
        }
        None
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    cross(sub(b, a), sub(c, a))
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

pub(crate) fn segments_touch(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Adjacent segments share one endpoint; they are degenerate only if they fold back collinearly.
fn overlap_adjacent(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (shared, p, q) = if b == c {
        (b, a, d)
    } else if a == d {
        (a, b, c)
    } else if a == c {
        (a, b, d)
    } else {
        (b, a, c)
    };
    let u = sub(p, shared);
    let v = sub(q, shared);
    cross(u, v) == 0.0 && u[0] * v[0] + u[1] * v[1] > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rules() {
        assert!(Polyline::new(vec![[0.0, 0.0], [1.0, 0.0]], true).is_err());
        assert!(Polyline::new(vec![[0.0, 0.0]], false).is_err());
        assert!(Polyline::new(vec![[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]], false).is_err());
        assert!(Polyline::new(vec![[0.0, 0.0], [1.0, 0.0]], false).is_ok());
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(Polyline::new(bowtie, true), Err(Error::SelfIntersecting(_, _))));
        let fold = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]];
        assert!(Polyline::new(fold, false).is_err());
        let c = Polyline::circle([0.0, 0.0], 1.0, 400).unwrap();
        assert!((c.signed_area() - std::f64::consts::PI).abs() < 1e-3);
    }
}
