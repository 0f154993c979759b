use super::{cross, dist, norm, sub, Polyline};

/// Per-vertex curvature, left unit normal and arclength of a polyline.
#[derive(Debug, Clone)]
pub struct CurveGeometry {
    /// Positive when the curve bends toward `normals`.
    pub curvature: Vec<f64>,
    /// Left unit normals (pointing to the `u < 0` side).
    pub normals: Vec<[f64; 2]>,
    pub arclength: Vec<f64>,
    pub length: f64,
}

impl CurveGeometry {
    /// Quadrature weight of each vertex: half the adjacent segment lengths.
    pub fn vertex_weights(&self, c: &Polyline) -> Vec<f64> {
        let seg = c.segment_lengths();
        let n = c.len();
        (0..n)
            .map(|i| {
                let prev = if i > 0 { seg[i - 1] } else if c.closed() { seg[n - 1] } else { 0.0 };
                let next = if i < seg.len() { seg[i] } else { 0.0 };
                0.5 * (prev + next)
            })
            .collect()
    }
}

/// Circle through three points: signed curvature and left normal at `b`.
fn circumcircle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> (f64, [f64; 2]) {
    let (u, v) = (sub(b, a), sub(c, b));
    let chord = sub(c, a);
    let lc = norm(chord);
    let tangent = [chord[0] / lc, chord[1] / lc];
    let left = [-tangent[1], tangent[0]];
    let k = 2.0 * cross(u, v) / (norm(u) * norm(v) * lc);
    if k == 0.0 || !k.is_finite() {
        return (0.0, left);
    }
    // Direction from b to the circumcentre, oriented as the left normal.
    let (ab, cb) = (sub(a, b), sub(c, b));
    let d = 2.0 * cross(ab, cb);
    let (la, lcb) = (ab[0] * ab[0] + ab[1] * ab[1], cb[0] * cb[0] + cb[1] * cb[1]);
    let o = [(cb[1] * la - ab[1] * lcb) / d, (ab[0] * lcb - cb[0] * la) / d];
    let r = norm(o);
    let s = k.signum();
    (k, [s * o[0] / r, s * o[1] / r])
}

fn arclengths(c: &Polyline) -> (Vec<f64>, f64) {
    let seg = c.segment_lengths();
    let mut s = vec![0.0; c.len()];
    for i in 1..c.len() {
        s[i] = s[i - 1] + seg[i - 1];
    }
    (s, seg.iter().sum())
}

/// Curvature from circles through consecutive vertex triples.
pub fn polyline_curvature(c: &Polyline) -> CurveGeometry {
    geometry_with(c, |i| {
        let n = c.len();
        if c.closed() {
            Some(((i + n - 1) % n, (i + 1) % n))
        } else if i == 0 || i + 1 == n {
            None
        } else {
            Some((i - 1, i + 1))
        }
    })
}

/// Curvature from circles through the vertex and the first vertices at least
/// `span` of arclength away on either side; suppresses vertex-placement noise.
pub fn polyline_curvature_span(c: &Polyline, span: f64) -> CurveGeometry {
    let n = c.len();
    let seg = c.segment_lengths();
    let total: f64 = seg.iter().sum();
    let span = if c.closed() { span.min(total / 3.0) } else { span };
    geometry_with(c, |i| {
        let mut back = i;
        let mut acc = 0.0;
        loop {
            if !c.closed() && back == 0 {
                break;
            }
            let prev = (back + n - 1) % n;
            acc += seg[prev];
            back = prev;
            if acc >= span || back == (i + 1) % n {
                break;
            }
        }
        let mut fwd = i;
        acc = 0.0;
        loop {
            if !c.closed() && fwd + 1 == n {
                break;
            }
            acc += seg[fwd];
            fwd = (fwd + 1) % n;
            if acc >= span || fwd == back {
                break;
            }
        }
        if back == i || fwd == i || back == fwd {
            None
        } else {
            Some((back, fwd))
        }
    })
}

fn geometry_with(c: &Polyline, nbrs: impl Fn(usize) -> Option<(usize, usize)>) -> CurveGeometry {
    let v = c.vertices();
    let n = v.len();
    let mut curvature = vec![f64::NAN; n];
    let mut normals = vec![[0.0, 0.0]; n];
    for i in 0..n {
        if let Some((a, b)) = nbrs(i) {
            let (k, nl) = circumcircle(v[a], v[i], v[b]);
            curvature[i] = k;
            normals[i] = nl;
        }
    }
    // Open-curve ends inherit from their nearest fitted vertex.
    if let Some(first) = curvature.iter().position(|k| !k.is_nan()) {
        let last = curvature.iter().rposition(|k| !k.is_nan()).unwrap_or(first);
        for i in 0..n {
            if curvature[i].is_nan() {
                let src = if i < first { first } else { last };
                curvature[i] = curvature[src];
                normals[i] = normals[src];
            }
        }
    } else {
        // Two-vertex chain: straight.
        let t = sub(v[n - 1], v[0]);
        let l = norm(t);
        for i in 0..n {
            curvature[i] = 0.0;
            normals[i] = [-t[1] / l, t[0] / l];
        }
    }
    let (arclength, length) = arclengths(c);
    let _ = dist;
    CurveGeometry { curvature, normals, arclength, length }
}
