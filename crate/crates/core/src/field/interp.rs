//! Point evaluation of gridded samples by separable Lagrange interpolation.

use super::{Boundary, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    Bilinear,
    /// Tensor-product Lagrange interpolation on a `w × w` stencil (`w` even, ≥ 2).
    Lagrange(usize),
}

impl Interp {
    fn width(self) -> usize {
        match self {
            Interp::Bilinear => 2,
            Interp::Lagrange(w) => w.max(2) & !1,
        }
    }
}

/// Stencil start index and weights along one axis; `None` outside a clamped domain.
fn axis(t: f64, n: usize, w: usize, b: Boundary) -> Option<(isize, [f64; 8])> {
    let i0 = t.floor();
    let mut base = i0 as isize - (w as isize / 2 - 1);
    if b == Boundary::Dirichlet {
        if t < -1e-9 || t > (n - 1) as f64 + 1e-9 {
            return None;
        }
        base = base.clamp(0, n as isize - w as isize);
    }
    let s = t - base as f64;
    let mut wts = [0.0; 8];
    for (k, wk) in wts.iter_mut().enumerate().take(w) {
        let mut p = 1.0;
        for m in 0..w {
            if m != k {
                p *= (s - m as f64) / (k as f64 - m as f64);
            }
        }
        *wk = p;
    }
    Some((base, wts))
}

/// Interpolated value at `p`, or `None` outside a Dirichlet domain.
pub fn sample(grid: &GridSpec, values: &[f64], p: [f64; 2], how: Interp) -> Option<f64> {
    let w = how.width().min(grid.nx).min(grid.ny).min(8);
    let tx = (p[0] - grid.x0) / grid.hx();
    let ty = (p[1] - grid.y0) / grid.hy();
    let (bx, wx) = axis(tx, grid.nx, w, grid.boundary)?;
    let (by, wy) = axis(ty, grid.ny, w, grid.boundary)?;
    let mut acc = 0.0;
    for (b, wyb) in wy.iter().enumerate().take(w) {
        let j = (by + b as isize).rem_euclid(grid.ny as isize) as usize;
        let mut row = 0.0;
        for (a, wxa) in wx.iter().enumerate().take(w) {
            let i = (bx + a as isize).rem_euclid(grid.nx as isize) as usize;
            row += wxa * values[grid.idx(i, j)];
        }
        acc += wyb * row;
    }
    Some(acc)
}
