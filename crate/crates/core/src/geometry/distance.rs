use super::{cross, dot, norm, sub, Polyline};
use crate::numerics::SplineCurve;

/// Distance from `p` to segment `ab` and the clamped segment parameter.
pub fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> (f64, f64) {
    let ab = sub(b, a);
    let l2 = dot(ab, ab);
    let t = if l2 > 0.0 { (dot(sub(p, a), ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    (norm(sub(p, q)), t)
}

/// Index of the nearest segment of `c` to `p` and the distance to it.
pub(crate) fn nearest_segment(c: &Polyline, p: [f64; 2]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for k in 0..c.segment_count() {
        let (a, b) = c.segment(k);
        let ab = sub(b, a);
        let ap = sub(p, a);
        let l2 = dot(ab, ab);
        let t = (dot(ap, ab) / l2).clamp(0.0, 1.0);
        let dx = ap[0] - t * ab[0];
        let dy = ap[1] - t * ab[1];
        let d2 = dx * dx + dy * dy;
        if d2 < best.1 {
            best = (k, d2);
        }
    }
    (best.0, best.1.sqrt())
}

/// Signed distance to the cubic spline through a polyline's vertices,
/// positive on the right of the direction of travel.
///
/// Distance to the smooth interpolant is smooth inside the curve's reach,
/// unlike distance to the polygon, whose gradient kinks along vertex bisectors.
#[derive(Debug, Clone)]
pub struct SignedDistance {
    poly: Polyline,
    spline: SplineCurve,
}

impl SignedDistance {
    pub fn new(c: &Polyline) -> Self {
        Self { poly: c.clone(), spline: SplineCurve::through(c.vertices(), c.closed()) }
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let (seg, _) = nearest_segment(&self.poly, p);
        let (_, q, tangent) = self.spline.closest_from(p, seg);
        let r = sub(p, q);
        let d = norm(r);
        if d == 0.0 {
            return 0.0;
        }
        if cross(tangent, r) > 0.0 {
            -d
        } else {
            d
        }
    }
}

fn polyline_distance(c: &Polyline, p: [f64; 2]) -> f64 {
    nearest_segment(c, p).1
}

/// Symmetric Hausdorff distance, sampling each segment at five points.
pub fn hausdorff_distance(a: &Polyline, b: &Polyline) -> f64 {
    let one_way = |x: &Polyline, y: &Polyline| {
        let mut worst: f64 = 0.0;
        for k in 0..x.segment_count() {
            let (p, q) = x.segment(k);
            for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let pt = [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])];
                worst = worst.max(polyline_distance(y, pt));
            }
        }
        worst
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_distance_to_circle_and_line() {
        let c = Polyline::circle([0.0, 0.0], 0.5, 512).unwrap();
        let sd = SignedDistance::new(&c);
        for p in [[0.0, 0.0], [0.3, 0.1], [0.9, -0.4], [-0.2, 0.45]] {
            let exact = norm(p) - 0.5;
            assert!((sd.eval(p) - exact).abs() < 1e-8, "{p:?}");
        }
        // Right-to-left line: the upper half-plane is on the right.
        let line = Polyline::new(vec![[2.0, 0.0], [0.5, 0.0], [-2.0, 0.0]], false).unwrap();
        let sd = SignedDistance::new(&line);
        assert!((sd.eval([0.1, 0.3]) - 0.3).abs() < 1e-14);
        assert!((sd.eval([0.1, -0.2]) + 0.2).abs() < 1e-14);
        assert_eq!(sd.eval([0.7, 0.0]), 0.0);
    }

    #[test]
    fn hausdorff_of_concentric_polygons() {
        let a = Polyline::circle([0.0, 0.0], 0.5, 64).unwrap();
        let b = Polyline::circle([0.0, 0.0], 0.45, 64).unwrap();
        let h = hausdorff_distance(&a, &b);
        assert!((h - 0.05).abs() < 1e-3);
        assert!(hausdorff_distance(&a, &a) <= 1e-15);
    }
}
