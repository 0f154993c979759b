//! Small 1-d numerical kernels shared by the modules.

mod spline;

pub use spline::{CubicSpline, SplineCurve};

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Maximise a unimodal `f` on `[a, b]` by golden-section search; returns `(x, f(x))`.
pub fn golden_max(f: &mut dyn FnMut(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Root of `f` in `[a, b]` by bisection to `xtol` followed by one secant step.
/// Returns `None` when `f(a)` and `f(b)` share a strict sign.
pub fn bracketed_root(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut fb = fb;
    while b - a > xtol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let x = a - fa * (b - a) / (fb - fa);
    Some(if x.is_finite() && x >= a && x <= b { x } else { 0.5 * (a + b) })
}

/// Least-squares line `y = slope·x + c`; returns `(slope, intercept, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let c = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - c).powi(2)).sum();
    (slope, c, (rss / n).sqrt())
}

/// `n` log-spaced values from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(a * b).sqrt()];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(&mut |x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 2.0, 80);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-14);
    }

    #[test]
    fn root_and_fit() {
        let r = bracketed_root(&|x: f64| x * x - 2.0, 0.0, 3.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bracketed_root(&|x: f64| x * x + 1.0, -1.0, 1.0, 1e-10).is_none());
        let x: Vec<f64> = [0.08f64, 0.04, 0.02].iter().map(|e| e.ln()).collect();
        let y: Vec<f64> = [0.08f64, 0.04, 0.02].iter().map(|e| (3.0 * e * e).ln()).collect();
        let (s, _, res) = linear_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-12 && res < 1e-12);
    }
}
