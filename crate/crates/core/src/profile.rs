//! The heteroclinic standing wave `g(x) = tanh(x/√2)` of `g″ = W′(g)` and its
//! cutoff `ḡ`, which equals `g` on `|x| ≤ 3|log ε|` and `sgn x` on `|x| ≥ 6|log ε|`.
//!
//! The blend is `ḡ = sgn + ζ(x/(3|log ε|))·(g − sgn)` with
//! `ζ(t) = 1 − S(|t| − 1)` on `1 ≤ |t| ≤ 2` and `S(s) = 10s³ − 15s⁴ + 6s⁵`,
//! which is C² and satisfies `|ζ′| + |ζ″| ≤ 7.7`.

use std::f64::consts::SQRT_2;

use crate::field::{w, w1, w2, w3};
use crate::numerics::adaptive_simpson;
use crate::{Error, Order, Result};

/// Profile width: `g(x) = tanh(x / WIDTH)`.
pub const WIDTH: f64 = SQRT_2;

/// `g` and its first four derivatives.
pub fn heteroclinic_all(x: f64) -> [f64; 5] {
    let s = x / WIDTH;
    let t = s.tanh();
    let c = 1.0 / s.cosh();
    let s2 = c * c;
    [
        t,
        s2 / SQRT_2,
        -t * s2,
        s2 / SQRT_2 * (3.0 * t * t - 1.0),
        t * s2 * (4.0 - 6.0 * t * t),
    ]
}

pub fn heteroclinic(x: f64, order: Order) -> f64 {
    let d = heteroclinic_all(x);
    match order {
        Order::Value => d[0],
        Order::First => d[1],
        Order::Second => d[2],
    }
}

/// `g(x) − sgn(x)` without cancellation.
fn tail(x: f64) -> f64 {
    let s = x.abs() / WIDTH;
    let q = 2.0 / ((2.0 * s).exp() + 1.0);
    if x >= 0.0 {
        -q
    } else {
        q
    }
}

/// `α = ∫ g′² dx`, by adaptive quadrature over `|x| ≤ X` where `g′(X)² = 1e−16`.
pub fn profile_energy_alpha() -> f64 {
    2.0 * half_line_integral(&|x| heteroclinic_all(x)[1].powi(2))
}

pub(crate) fn half_line_integral(f: &dyn Fn(f64) -> f64) -> f64 {
    let x_max = truncation_radius();
    adaptive_simpson(f, 0.0, x_max, 1e-15)
}

/// Where `g′² = sech⁴(x/√2)/2` drops to `1e−16`.
fn truncation_radius() -> f64 {
    // sech(s) ≈ 2e^{−s}, so sech⁴/2 = 1e−16 at s = ln(2·(2e16)^{1/4}).
    let s = (2.0 * (2e16f64).powf(0.25)).ln();
    WIDTH * s
}

/// Closed form `α = 2√2/3`.
pub const ALPHA: f64 = 2.0 * SQRT_2 / 3.0;

fn smoothstep(s: f64) -> [f64; 5] {
    let s2 = s * s;
    [
        s2 * s * (10.0 - 15.0 * s + 6.0 * s2),
        30.0 * s2 * (1.0 - 2.0 * s + s2),
        60.0 * s - 180.0 * s2 + 120.0 * s2 * s,
        60.0 - 360.0 * s + 360.0 * s2,
        -360.0 + 720.0 * s,
    ]
}

/// Cutoff profile `ḡ` for a fixed `ε ∈ (0, 1/e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffProfile {
    pub epsilon: f64,
    pub inner: f64,
    pub outer: f64,
}

impl CutoffProfile {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < (-1f64).exp()) {
            return Err(Error::InvalidArgument(format!(
                "cutoff needs 0 < eps < 1/e, got {epsilon}"
            )));
        }
        let l = epsilon.ln().abs();
        Ok(Self { epsilon, inner: 3.0 * l, outer: 6.0 * l })
    }

    /// `ḡ` and its first four derivatives.
    pub fn eval_all(&self, x: f64) -> [f64; 5] {
        let ax = x.abs();
        if ax <= self.inner {
            return heteroclinic_all(x);
        }
        let sgn = x.signum();
        if ax >= self.outer {
            return [sgn, 0.0, 0.0, 0.0, 0.0];
        }
        let l = self.inner;
        let s = smoothstep(ax / l - 1.0);
        // ζ and its x-derivatives; each derivative brings a factor sgn/l.
        let mut z = [1.0 - s[0], 0.0, 0.0, 0.0, 0.0];
        let mut f = 1.0;
        for k in 1..5 {
            f *= sgn / l;
            z[k] = -s[k] * f;
        }
        let g = heteroclinic_all(x);
        let q = [tail(x), g[1], g[2], g[3], g[4]];
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let mut out = [0.0; 5];
        for (k, o) in out.iter_mut().enumerate() {
            *o = (0..=k).map(|j| BINOM[k][j] * z[j] * q[k - j]).sum();
        }
        out[0] += sgn;
        out
    }

    pub fn eval(&self, x: f64, order: Order) -> f64 {
        let d = self.eval_all(x);
        match order {
            Order::Value => d[0],
            Order::First => d[1],
            Order::Second => d[2],
        }
    }

    /// `η̄ = ḡ″ − W′(ḡ)` with two derivatives; exactly zero outside the blend band.
    pub fn residual(&self, x: f64) -> [f64; 3] {
        let ax = x.abs();
        if ax <= self.inner || ax >= self.outer {
            return [0.0; 3];
        }
        let g = self.eval_all(x);
        [
            g[2] - w1(g[0]),
            g[3] - w2(g[0]) * g[1],
            g[4] - w3(g[0]) * g[1] * g[1] - w2(g[0]) * g[2],
        ]
    }

    /// `sup |η̄| + |η̄′| + |η̄″|` over `samples` points of the blend band.
    pub fn residual_sup(&self, samples: usize) -> f64 {
        (0..=samples)
            .map(|k| {
                let x = self.inner + (self.outer - self.inner) * k as f64 / samples as f64;
                self.residual(x).iter().map(|v| v.abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `∫ ḡ′² dx`.
    pub fn energy(&self) -> f64 {
        let f = |x: f64| self.eval_all(x)[1].powi(2);
        2.0 * (adaptive_simpson(&f, 0.0, self.inner, 1e-15)
            + adaptive_simpson(&f, self.inner, self.outer, 1e-15))
    }

    /// Equipartition potential term `W(ḡ)`.
    pub fn potential(&self, x: f64) -> f64 {
        w(self.eval_all(x)[0])
    }
}

pub fn cutoff_profile(eps: f64, x: f64, order: Order) -> Result<f64> {
    Ok(CutoffProfile::new(eps)?.eval(x, order))
}

/// Dense-sample sup of `|η̄| + |η̄′| + |η̄″|`.
pub fn cutoff_residual_bound(eps: f64) -> Result<f64> {
    Ok(CutoffProfile::new(eps)?.residual_sup(20_000))
}

/// Regression constant: `cutoff_residual_bound(ε) ≤ RESIDUAL_K · ε³` for `ε ≤ 0.1`.
pub const RESIDUAL_K: f64 = 1.0;
