//! Interpolating cubic splines (natural or periodic) and planar spline curves.

/// Cubic spline through `(t_i, y_i)`; periodic splines close with period `t_n − t_0`.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    t: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    periodic: bool,
}

fn thomas(a: &[f64], b: &[f64], c: &[f64], r: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = r[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / den;
        dp[i] = (r[i] - a[i] * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// Cyclic tridiagonal solve (Sherman–Morrison); `a[0]` and `c[n-1]` are the corner entries.
fn cyclic_thomas(a: &[f64], b: &[f64], c: &[f64], r: &[f64]) -> Vec<f64> {
    let n = b.len();
    let (alpha, beta) = (c[n - 1], a[0]);
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    let x = thomas(a, &bb, c, r);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = thomas(a, &bb, c, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

impl CubicSpline {
    /// `t` strictly increasing. For periodic splines `t` has one more entry than `y`
    /// (the closing knot) and `y` is wrapped.
    pub fn new(t: Vec<f64>, y: Vec<f64>, periodic: bool) -> Self {
        let n = y.len();
        assert!(n >= 2, "spline needs two points");
        if periodic {
            assert_eq!(t.len(), n + 1);
            let h: Vec<f64> = (0..n).map(|i| t[i + 1] - t[i]).collect();
            let yv = |i: usize| y[i % n];
            let mut a = vec![0.0; n];
            let mut b = vec![0.0; n];
            let mut c = vec![0.0; n];
            let mut r = vec![0.0; n];
            for i in 0..n {
                let hp = h[(i + n - 1) % n];
                let hi = h[i];
                a[i] = hp;
                b[i] = 2.0 * (hp + hi);
                c[i] = hi;
                r[i] = 6.0 * ((yv(i + 1) - yv(i)) / hi - (yv(i) - yv(i + n - 1)) / hp);
            }
            let m = if n == 2 { vec![0.0; 2] } else { cyclic_thomas(&a, &b, &c, &r) };
            Self { t, y, m, periodic }
        } else {
            assert_eq!(t.len(), n);
            let mut m = vec![0.0; n];
            if n > 2 {
                let k = n - 2;
                let mut a = vec![0.0; k];
                let mut b = vec![0.0; k];
                let mut c = vec![0.0; k];
                let mut r = vec![0.0; k];
                for i in 1..n - 1 {
                    let (hp, hi) = (t[i] - t[i - 1], t[i + 1] - t[i]);
                    a[i - 1] = hp;
                    b[i - 1] = 2.0 * (hp + hi);
                    c[i - 1] = hi;
                    r[i - 1] = 6.0 * ((y[i + 1] - y[i]) / hi - (y[i] - y[i - 1]) / hp);
                }
                let inner = thomas(&a, &b, &c, &r);
                m[1..n - 1].copy_from_slice(&inner);
            }
            Self { t, y, m, periodic }
        }
    }

    pub fn segments(&self) -> usize {
        if self.periodic {
            self.y.len()
        } else {
            self.y.len() - 1
        }
    }

    pub fn knot(&self, i: usize) -> f64 {
        self.t[i]
    }

    fn yv(&self, i: usize) -> f64 {
        self.y[i % self.y.len()]
    }

    fn mv(&self, i: usize) -> f64 {
        self.m[i % self.m.len()]
    }

    /// Value, first and second derivative on segment `i` at parameter `s ∈ [t_i, t_{i+1}]`.
    pub fn eval_on(&self, i: usize, s: f64) -> [f64; 3] {
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let (a, b) = (t1 - s, s - t0);
        let (m0, m1) = (self.mv(i), self.mv(i + 1));
        let (y0, y1) = (self.yv(i), self.yv(i + 1));
        let v = m0 * a * a * a / (6.0 * h) + m1 * b * b * b / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * a
            + (y1 / h - m1 * h / 6.0) * b;
        let d1 = -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - (y0 / h - m0 * h / 6.0)
            + (y1 / h - m1 * h / 6.0);
        let d2 = (m0 * a + m1 * b) / h;
        [v, d1, d2]
    }

    /// Segment containing `s` (wrapped for periodic splines) and the wrapped parameter.
    pub fn locate(&self, s: f64) -> (usize, f64) {
        let (lo, hi) = (self.t[0], *self.t.last().expect("knots"));
        let s = if self.periodic { lo + (s - lo).rem_euclid(hi - lo) } else { s.clamp(lo, hi) };
        let i = match self.t.binary_search_by(|v| v.partial_cmp(&s).expect("finite knot")) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        (i.min(self.segments() - 1), s)
    }

    pub fn eval(&self, s: f64) -> [f64; 3] {
        let (i, s) = self.locate(s);
        self.eval_on(i, s)
    }
}

/// Planar curve `s ↦ (x(s), y(s))` interpolating vertices with a chord-length parameter.
#[derive(Debug, Clone)]
pub struct SplineCurve {
    pub x: CubicSpline,
    pub y: CubicSpline,
    pub closed: bool,
}

impl SplineCurve {
    pub fn through(vertices: &[[f64; 2]], closed: bool) -> Self {
        let n = vertices.len();
        let mut t = vec![0.0];
        let count = if closed { n } else { n - 1 };
        for i in 0..count {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            t.push(t[i] + (b[0] - a[0]).hypot(b[1] - a[1]));
        }
        let xs: Vec<f64> = vertices.iter().map(|v| v[0]).collect();
        let ys: Vec<f64> = vertices.iter().map(|v| v[1]).collect();
        Self {
            x: CubicSpline::new(t.clone(), xs, closed),
            y: CubicSpline::new(t, ys, closed),
            closed,
        }
    }

    pub fn param_end(&self) -> f64 {
        self.x.knot(self.x.segments())
    }

    /// Position, velocity and acceleration on segment `i` at parameter `s`.
    pub fn eval_on(&self, i: usize, s: f64) -> [[f64; 2]; 3] {
        let (a, b) = (self.x.eval_on(i, s), self.y.eval_on(i, s));
        [[a[0], b[0]], [a[1], b[1]], [a[2], b[2]]]
    }

    pub fn eval(&self, s: f64) -> [[f64; 2]; 3] {
        let (i, s) = self.x.locate(s);
        self.eval_on(i, s)
    }

    /// Closest point to `p` starting from segment `seg`: returns `(parameter, point, tangent)`.
    pub fn closest_from(&self, p: [f64; 2], seg: usize) -> (f64, [f64; 2], [f64; 2]) {
        let nseg = self.x.segments();
        let mut i = seg.min(nseg - 1);
        let mut s = 0.5 * (self.x.knot(i) + self.x.knot(i + 1));
        for _ in 0..40 {
            let [c, d1, d2] = self.eval_on(i, s);
            let r = [c[0] - p[0], c[1] - p[1]];
            let g = r[0] * d1[0] + r[1] * d1[1];
            let h = d1[0] * d1[0] + d1[1] * d1[1] + r[0] * d2[0] + r[1] * d2[1];
            let step = if h > 0.0 { -g / h } else { -g.signum() * 0.25 * (self.x.knot(i + 1) - self.x.knot(i)) };
            let mut next = s + step;
            let (lo, hi) = (self.x.knot(i), self.x.knot(i + 1));
            if next < lo {
                if i > 0 {
                    i -= 1;
                } else if self.closed {
                    i = nseg - 1;
                    next += self.param_end() - self.x.knot(0);
                } else {
                    next = lo;
                }
            } else if next > hi {
                if i + 1 < nseg {
                    i += 1;
                } else if self.closed {
                    i = 0;
                    next -= self.param_end() - self.x.knot(0);
                } else {
                    next = hi;
                }
            }
            let (lo, hi) = (self.x.knot(i), self.x.knot(i + 1));
            next = next.clamp(lo, hi);
            let done = (next - s).abs() <= 1e-15 * (1.0 + s.abs());
            s = next;
            if done {
                break;
            }
        }
        let [c, d1, _] = self.eval_on(i, s);
        (s, c, d1)
    }

    /// Arclength from the parameter origin to every knot (5-point Gauss–Legendre per segment).
    pub fn knot_arclengths(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        for i in 0..self.x.segments() {
            let len = self.segment_length(i, self.x.knot(i), self.x.knot(i + 1));
            out.push(out[i] + len);
        }
        out
    }

    fn segment_length(&self, i: usize, a: f64, b: f64) -> f64 {
        const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
        const W: [f64; 5] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
        let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
        X.iter()
            .zip(W)
            .map(|(x, w)| {
                let d = self.eval_on(i, m + r * x)[1];
                w * d[0].hypot(d[1])
            })
            .sum::<f64>()
            * r
    }

    /// `n` points equally spaced in arclength (closed curves: the start point is kept).
    pub fn resample_uniform(&self, n: usize) -> Vec<[f64; 2]> {
        let arcs = self.knot_arclengths();
        let total = *arcs.last().expect("arclengths");
        let denom = if self.closed { n as f64 } else { (n - 1) as f64 };
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        for k in 0..n {
            let target = total * k as f64 / denom;
            while seg + 1 < self.x.segments() && arcs[seg + 1] < target {
                seg += 1;
            }
            let (a, b) = (self.x.knot(seg), self.x.knot(seg + 1));
            let mut s = a + (b - a) * ((target - arcs[seg]) / (arcs[seg + 1] - arcs[seg])).clamp(0.0, 1.0);
            for _ in 0..20 {
                let f = arcs[seg] + self.segment_length(seg, a, s) - target;
                let d = self.eval_on(seg, s)[1];
                let step = f / d[0].hypot(d[1]);
                s = (s - step).clamp(a, b);
                if step.abs() < 1e-14 * (1.0 + s.abs()) {
                    break;
                }
            }
            out.push(self.eval_on(seg, s)[0]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn natural_spline_reproduces_lines() {
        let t: Vec<f64> = (0..6).map(|i| i as f64 * 0.7).collect();
        let y: Vec<f64> = t.iter().map(|s| 2.0 * s - 1.0).collect();
        let sp = CubicSpline::new(t, y, false);
        for s in [0.1, 1.3, 3.4] {
            let [v, d, dd] = sp.eval(s);
            assert!((v - (2.0 * s - 1.0)).abs() < 1e-13);
            assert!((d - 2.0).abs() < 1e-12);
            assert!(dd.abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_spline_tracks_circle() {
        let n = 64;
        let verts: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                [0.5 * a.cos(), 0.5 * a.sin()]
            })
            .collect();
        let c = SplineCurve::through(&verts, true);
        let end = c.param_end();
        for k in 0..500 {
            let s = end * k as f64 / 500.0;
            let p = c.eval(s)[0];
            assert!((p[0].hypot(p[1]) - 0.5).abs() < 1e-6);
        }
        let arcs = c.knot_arclengths();
        assert!((arcs[n] - PI).abs() < 1e-6);
        let (_, q, _) = c.closest_from([0.0, 0.8], 3);
        assert!((q[0]).abs() < 1e-7 && (q[1] - 0.5).abs() < 1e-6);
        let pts = c.resample_uniform(40);
        let d0 = (pts[1][0] - pts[0][0]).hypot(pts[1][1] - pts[0][1]);
        for w in pts.windows(2) {
            let d = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            assert!((d - d0).abs() < 1e-8);
        }
    }
}
