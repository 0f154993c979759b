//! `|𝒜(u)| = √(|∇²u|² − |∇|∇u||²) / |∇u|`, with `∇|∇u| = ∇²u·∇u/|∇u|`.

use crate::field::{derivatives, sample, DerivativeScheme, Derivatives, GridSpec, Interp, ScalarField};
use crate::Result;

pub const DEFAULT_GRAD_FLOOR: f64 = 0.1;

/// Grid samples where masked points hold NaN.
#[derive(Debug, Clone)]
pub struct MaskedField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl MaskedField {
    pub fn get(&self, k: usize) -> Option<f64> {
        let v = self.values[k];
        (!v.is_nan()).then_some(v)
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().copied().filter(|v| !v.is_nan()).reduce(f64::max)
    }

    pub fn unmasked(&self) -> usize {
        self.values.iter().filter(|v| !v.is_nan()).count()
    }
}

fn a_norm(gx: f64, gy: f64, hxx: f64, hxy: f64, hyy: f64) -> f64 {
    let g = gx.hypot(gy);
    let (nx, ny) = (gx / g, gy / g);
    let frob = hxx * hxx + 2.0 * hxy * hxy + hyy * hyy;
    let (hn0, hn1) = (hxx * nx + hxy * ny, hxy * nx + hyy * ny);
    let rad = (frob - hn0 * hn0 - hn1 * hn1).max(0.0);
    rad.sqrt() / g
}

/// `|𝒜|` where `|∇u| ≥ grad_floor · max|∇u|`, NaN elsewhere.
pub fn enhanced_a_with(u: &ScalarField, grad_floor: f64, scheme: DerivativeScheme) -> Result<MaskedField> {
    let d = derivatives(u, scheme, true)?;
    let gmax = (0..d.gx.len()).map(|k| d.grad_norm(k)).fold(0.0, f64::max);
    let floor = grad_floor * gmax;
    let values = (0..d.gx.len())
        .map(|k| {
            let g = d.grad_norm(k);
            if g > 0.0 && g >= floor {
                a_norm(d.gx[k], d.gy[k], d.hxx[k], d.hxy[k], d.hyy[k])
            } else {
                f64::NAN
            }
        })
        .collect();
    Ok(MaskedField { grid: *u.grid(), values })
}

/// [`enhanced_a_with`] using Fourier derivatives on periodic grids and central differences otherwise.
pub fn enhanced_a(u: &ScalarField, grad_floor: f64) -> Result<MaskedField> {
    enhanced_a_with(u, grad_floor, DerivativeScheme::auto(u.grid()))
}

/// `|𝒜|` at an off-grid point from interpolated derivatives; `None` where `|∇u| = 0` or outside.
pub fn sample_enhanced_a(d: &Derivatives, p: [f64; 2], how: Interp) -> Option<f64> {
    let s = |v: &[f64]| sample(&d.grid, v, p, how);
    let (gx, gy) = (s(&d.gx)?, s(&d.gy)?);
    if gx == 0.0 && gy == 0.0 {
        return None;
    }
    Some(a_norm(gx, gy, s(&d.hxx)?, s(&d.hxy)?, s(&d.hyy)?))
}
