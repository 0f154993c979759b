//! Second-order central differences honouring the grid's boundary mode.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Boundary, GridSpec, ScalarField, SpectralPlan};
use crate::Result;

/// Fill a field row by row in parallel.
pub(crate) fn par_rows(grid: &GridSpec, f: impl Fn(usize, usize) -> f64 + Sync) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    out.par_chunks_mut(grid.nx).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            *o = f(i, j);
        }
    });
    out
}

pub fn fd_gradient(f: &ScalarField) -> (ScalarField, ScalarField) {
    let g = *f.grid();
    let v = f.values();
    let (hx, hy) = (g.hx(), g.hy());
    let gx = par_rows(&g, |i, j| {
        (v[g.idx(g.nbr_x(i, 1), j)] - v[g.idx(g.nbr_x(i, -1), j)]) / (2.0 * hx)
    });
    let gy = par_rows(&g, |i, j| {
        (v[g.idx(i, g.nbr_y(j, 1))] - v[g.idx(i, g.nbr_y(j, -1))]) / (2.0 * hy)
    });
    (
        ScalarField::from_parts(g, gx, f.time()),
        ScalarField::from_parts(g, gy, f.time()),
    )
}

pub fn fd_laplacian(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    let v = f.values();
    let (ax, ay) = (1.0 / (g.hx() * g.hx()), 1.0 / (g.hy() * g.hy()));
    let lap = par_rows(&g, |i, j| {
        let c = v[g.idx(i, j)];
        (v[g.idx(g.nbr_x(i, 1), j)] - 2.0 * c + v[g.idx(g.nbr_x(i, -1), j)]) * ax
            + (v[g.idx(i, g.nbr_y(j, 1))] - 2.0 * c + v[g.idx(i, g.nbr_y(j, -1))]) * ay
    });
    ScalarField::from_parts(g, lap, f.time())
}

#[derive(Debug, Clone)]
pub struct Hessian {
    pub xx: ScalarField,
    pub xy: ScalarField,
    pub yx: ScalarField,
    pub yy: ScalarField,
}

pub fn fd_hessian(f: &ScalarField) -> Hessian {
    let g = *f.grid();
    let v = f.values();
    let (hx, hy) = (g.hx(), g.hy());
    let xx = par_rows(&g, |i, j| {
        (v[g.idx(g.nbr_x(i, 1), j)] - 2.0 * v[g.idx(i, j)] + v[g.idx(g.nbr_x(i, -1), j)]) / (hx * hx)
    });
    let yy = par_rows(&g, |i, j| {
        (v[g.idx(i, g.nbr_y(j, 1))] - 2.0 * v[g.idx(i, j)] + v[g.idx(i, g.nbr_y(j, -1))]) / (hy * hy)
    });
    let xy = par_rows(&g, |i, j| {
        let (ip, im, jp, jm) = (g.nbr_x(i, 1), g.nbr_x(i, -1), g.nbr_y(j, 1), g.nbr_y(j, -1));
        (v[g.idx(ip, jp)] - v[g.idx(ip, jm)] - v[g.idx(im, jp)] + v[g.idx(im, jm)]) / (4.0 * hx * hy)
    });
    let t = f.time();
    let xy = ScalarField::from_parts(g, xy, t);
    Hessian {
        xx: ScalarField::from_parts(g, xx, t),
        yx: xy.clone(),
        xy,
        yy: ScalarField::from_parts(g, yy, t),
    }
}

/// How diagnostics differentiate sampled fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeScheme {
    Central,
    /// Fourier differentiation; periodic grids only.
    Spectral,
}

impl DerivativeScheme {
    /// Fourier on periodic grids, central differences otherwise.
    pub fn auto(grid: &GridSpec) -> Self {
        match grid.boundary {
            Boundary::Periodic => Self::Spectral,
            Boundary::Dirichlet => Self::Central,
        }
    }
}

/// Gradient and (optionally) Hessian samples of a field.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub grid: GridSpec,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub hxx: Vec<f64>,
    pub hxy: Vec<f64>,
    pub hyy: Vec<f64>,
}

impl Derivatives {
    pub fn grad_norm(&self, k: usize) -> f64 {
        self.gx[k].hypot(self.gy[k])
    }
}

/// Gradient, plus the Hessian when `hessian` is set (left empty otherwise).
pub fn derivatives(f: &ScalarField, scheme: DerivativeScheme, hessian: bool) -> Result<Derivatives> {
    let grid = *f.grid();
    match scheme {
        DerivativeScheme::Central => {
            let (gx, gy) = fd_gradient(f);
            let (hxx, hxy, hyy) = if hessian {
                let h = fd_hessian(f);
                (h.xx.into_values(), h.xy.into_values(), h.yy.into_values())
            } else {
                (vec![], vec![], vec![])
            };
            Ok(Derivatives { grid, gx: gx.into_values(), gy: gy.into_values(), hxx, hxy, hyy })
        }
        DerivativeScheme::Spectral => {
            let plan = SpectralPlan::new(&grid)?;
            let s = plan.forward(f.values());
            let i = Complex64::new(0.0, 1.0);
            let gx = plan.apply_symbol(&s, |a, _| i * plan.odd_kx(a));
            let gy = plan.apply_symbol(&s, |_, b| i * plan.odd_ky(b));
            let (hxx, hxy, hyy) = if hessian {
                (
                    plan.apply_symbol(&s, |a, _| Complex64::new(-plan.kx()[a].powi(2), 0.0)),
                    plan.apply_symbol(&s, |a, b| Complex64::new(-plan.odd_kx(a) * plan.odd_ky(b), 0.0)),
                    plan.apply_symbol(&s, |_, b| Complex64::new(-plan.ky()[b].powi(2), 0.0)),
                )
            } else {
                (vec![], vec![], vec![])
            };
            Ok(Derivatives { grid, gx, gy, hxx, hxy, hyy })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn periodic(n: usize) -> GridSpec {
        GridSpec::new(n, n, [0.0, 0.0], [1.0, 1.0], Boundary::Periodic).unwrap()
    }

    fn dirichlet(n: usize) -> GridSpec {
        GridSpec::new(n, n, [-1.0, -1.0], [1.0, 1.0], Boundary::Dirichlet).unwrap()
    }

    fn interior(g: &GridSpec) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..g.ny - 1).flat_map(move |j| (1..g.nx - 1).map(move |i| (i, j)))
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        for g in [periodic(16), dirichlet(16)] {
            let f = ScalarField::constant(g, 3.5, 0.0);
            let (gx, gy) = fd_gradient(&f);
            let h = fd_hessian(&f);
            let l = fd_laplacian(&f);
            for k in 0..g.len() {
                for v in [gx.values()[k], gy.values()[k], h.xx.values()[k], h.xy.values()[k], h.yy.values()[k], l.values()[k]] {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn exact_on_low_degree_polynomials() {
        let g = dirichlet(21);
        let fx = ScalarField::from_fn(g, 0.0, |x, _| x).unwrap();
        let (gx, gy) = fd_gradient(&fx);
        let q = ScalarField::from_fn(g, 0.0, |x, y| x * x + y * y).unwrap();
        let lap = fd_laplacian(&q);
        let xy = ScalarField::from_fn(g, 0.0, |x, y| x * y).unwrap();
        let h = fd_hessian(&xy);
        let affine = ScalarField::from_fn(g, 0.0, |x, y| 2.0 * x - 3.0 * y + 1.0).unwrap();
        let la = fd_laplacian(&affine);
        for (i, j) in interior(&g) {
            let k = g.idx(i, j);
            assert!((gx.values()[k] - 1.0).abs() < 1e-12);
            assert!(gy.values()[k].abs() < 1e-12);
            assert!((lap.values()[k] - 4.0).abs() < 1e-9);
            assert!((h.xy.values()[k] - 1.0).abs() < 1e-12);
            assert!(la.values()[k].abs() < 1e-9);
        }
    }

    fn sup_err(n: usize, op: &dyn Fn(&ScalarField) -> Vec<f64>, exact: &dyn Fn(f64, f64) -> f64, f: &dyn Fn(f64, f64) -> f64) -> f64 {
        let g = periodic(n);
        let fld = ScalarField::from_fn(g, 0.0, f).unwrap();
        op(&fld)
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let [x, y] = g.point(k);
                (v - exact(x, y)).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn second_order_refinement() {
        let sin = |x: f64, _: f64| (2.0 * PI * x).sin();
        let cosy = |_: f64, y: f64| (2.0 * PI * y).cos();
        let grad = |f: &ScalarField| fd_gradient(f).0.into_values();
        let lap = |f: &ScalarField| fd_laplacian(f).into_values();
        let hyy = |f: &ScalarField| fd_hessian(f).yy.into_values();
        let cases: [(&dyn Fn(&ScalarField) -> Vec<f64>, Box<dyn Fn(f64, f64) -> f64>, &dyn Fn(f64, f64) -> f64); 3] = [
            (&grad, Box::new(|x, _| 2.0 * PI * (2.0 * PI * x).cos()), &sin),
            (&lap, Box::new(|x, _| -4.0 * PI * PI * (2.0 * PI * x).sin()), &sin),
            (&hyy, Box::new(|_, y| -4.0 * PI * PI * (2.0 * PI * y).cos()), &cosy),
        ];
        for (op, exact, f) in cases.iter() {
            let e1 = sup_err(32, *op, exact.as_ref(), *f);
            let e2 = sup_err(64, *op, exact.as_ref(), *f);
            let ratio = e1 / e2;
            assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn summation_by_parts_on_periodic_grids() {
        let g = GridSpec::new(24, 20, [0.0, 0.0], [1.3, 0.9], Boundary::Periodic).unwrap();
        let f = ScalarField::from_fn(g, 0.0, |x, y| (3.0 * x).sin() * (1.0 + y * y)).unwrap();
        let h = ScalarField::from_fn(g, 0.0, |x, y| (x * y).exp() - 2.0 * x).unwrap();
        let a: f64 = f.values().iter().zip(fd_laplacian(&h).values()).map(|(p, q)| p * q).sum();
        let b: f64 = h.values().iter().zip(fd_laplacian(&f).values()).map(|(p, q)| p * q).sum();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
    }

    #[test]
    fn spectral_derivatives_are_exact_on_trig_polynomials() {
        let g = GridSpec::new(32, 16, [0.0, 0.0], [2.0, 1.0], Boundary::Periodic).unwrap();
        let f = ScalarField::from_fn(g, 0.0, |x, y| (PI * x).sin() * (2.0 * PI * y).cos()).unwrap();
        let d = derivatives(&f, DerivativeScheme::Spectral, true).unwrap();
        for k in 0..g.len() {
            let [x, y] = g.point(k);
            let (s, c) = ((PI * x).sin(), (2.0 * PI * y).cos());
            let (cx, sy) = ((PI * x).cos(), (2.0 * PI * y).sin());
            assert!((d.gx[k] - PI * cx * c).abs() < 1e-11);
            assert!((d.gy[k] + 2.0 * PI * s * sy).abs() < 1e-11);
            assert!((d.hxx[k] + PI * PI * s * c).abs() < 1e-10);
            assert!((d.hxy[k] + 2.0 * PI * PI * cx * sy).abs() < 1e-10);
            assert!((d.hyy[k] + 4.0 * PI * PI * s * c).abs() < 1e-10);
        }
    }
}
