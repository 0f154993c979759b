use rayon::prelude::*;

use super::GaussianMeasure;
use crate::error::invalid;
use crate::field::{derivatives, kahan_sum, w, DerivativeScheme, GridSpec, ScalarField};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// `ε|∇u|²/2 + W(u)/ε`
    Energy,
    /// `ε|∇u|²/2 − W(u)/ε`
    Discrepancy,
}

/// Per-sample density (energy per area).
#[derive(Debug, Clone)]
pub struct DensityField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub kind: DensityKind,
    pub epsilon: f64,
}

impl DensityField {
    /// Grid sum times cell area.
    pub fn total(&self) -> f64 {
        kahan_sum(&self.values) * self.grid.cell_area()
    }

    pub fn l1(&self) -> f64 {
        let a: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        kahan_sum(&a) * self.grid.cell_area()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        invalid(format!("eps must be positive, got {eps}"))
    }
}

fn densities(u: &ScalarField, eps: f64, scheme: DerivativeScheme) -> Result<(Vec<f64>, Vec<f64>)> {
    check_eps(eps)?;
    let d = derivatives(u, scheme, false)?;
    Ok(u.values()
        .par_iter()
        .enumerate()
        .map(|(k, &v)| {
            let grad = 0.5 * eps * (d.gx[k] * d.gx[k] + d.gy[k] * d.gy[k]);
            (grad, w(v) / eps)
        })
        .unzip())
}

/// Energy density with derivatives from `scheme`.
pub fn energy_measure_with(u: &ScalarField, eps: f64, scheme: DerivativeScheme) -> Result<DensityField> {
    let (g, p) = densities(u, eps, scheme)?;
    let values = g.iter().zip(&p).map(|(a, b)| a + b).collect();
    Ok(DensityField { grid: *u.grid(), values, kind: DensityKind::Energy, epsilon: eps })
}

/// Energy density; Fourier derivatives on periodic grids, central differences otherwise.
pub fn energy_measure(u: &ScalarField, eps: f64) -> Result<DensityField> {
    energy_measure_with(u, eps, DerivativeScheme::auto(u.grid()))
}

/// Discrepancy density and its L¹ norm.
pub fn discrepancy(u: &ScalarField, eps: f64) -> Result<(DensityField, f64)> {
    let (g, p) = densities(u, eps, DerivativeScheme::auto(u.grid()))?;
    let values = g.iter().zip(&p).map(|(a, b)| a - b).collect();
    let d = DensityField { grid: *u.grid(), values, kind: DensityKind::Discrepancy, epsilon: eps };
    let l1 = d.l1();
    Ok((d, l1))
}

/// Mass of the planar Gaussian `N(y, 2s·I)` outside the sampled rectangle.
pub fn kernel_leakage(grid: &GridSpec, y: [f64; 2], s: f64) -> f64 {
    let w = (4.0 * s).sqrt();
    let inside = |a: f64, b: f64, c: f64| 0.5 * (libm::erf((b - c) / w) - libm::erf((a - c) / w));
    (1.0 - inside(grid.x0, grid.x1, y[0]) * inside(grid.y0, grid.y1, y[1])).max(0.0)
}

/// Separable kernel rows `exp(−(x_i − c)²/4s)` for each centre.
pub(crate) fn kernel_rows(n: usize, coord: impl Fn(usize) -> f64, centers: &[f64], s: f64) -> Vec<Vec<f64>> {
    centers
        .iter()
        .map(|c| {
            (0..n)
                .map(|i| {
                    let d = coord(i) - c;
                    (-d * d / (4.0 * s)).exp()
                })
                .collect()
        })
        .collect()
}

impl GaussianMeasure for DensityField {
    fn bounds(&self) -> [[f64; 2]; 2] {
        [[self.grid.x0, self.grid.y0], [self.grid.x1, self.grid.y1]]
    }

    fn probe_grid(&self, cx: &[f64], cy: &[f64], s: f64) -> Vec<f64> {
        let g = &self.grid;
        let kx = kernel_rows(g.nx, |i| g.x(i), cx, s);
        let ky = kernel_rows(g.ny, |j| g.y(j), cy, s);
        // a[j][a] = Σ_i M[j][i]·kx[a][i]
        let a: Vec<Vec<f64>> = self
            .values
            .par_chunks(g.nx)
            .map(|row| kx.iter().map(|k| row.iter().zip(k).map(|(m, w)| m * w).sum()).collect())
            .collect();
        let norm = g.cell_area() / (4.0 * std::f64::consts::PI * s).sqrt();
        let mut out = Vec::with_capacity(cx.len() * cy.len());
        for kyb in &ky {
            for ia in 0..cx.len() {
                let v: f64 = a.iter().zip(kyb).map(|(row, w)| row[ia] * w).sum();
                out.push(v * norm);
            }
        }
        out
    }

    fn leakage(&self, y: [f64; 2], s: f64) -> f64 {
        kernel_leakage(&self.grid, y, s)
    }

    fn default_scales(&self) -> [f64; 2] {
        let [lx, ly] = self.grid.extent();
        let side = lx.min(ly);
        let lo = (4.0 * self.epsilon).powi(2);
        [lo, (side / 4.0).powi(2).max(4.0 * lo)]
    }
}

/// `∫ (4πs)^{−1/2} e^{−|x−y|²/4s} dμ_ε` by grid summation.
///
/// The kernel is not periodized; mass beyond the window is dropped and
/// logged when the planar Gaussian leaks more than 1e−6 of its mass.
pub fn gaussian_density(u: &ScalarField, eps: f64, y: [f64; 2], s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return invalid(format!("scale s must be positive, got {s}"));
    }
    let leak = kernel_leakage(u.grid(), y, s);
    if leak > 1e-6 {
        log::warn!("gaussian_density: kernel at y = {y:?}, s = {s} leaks {leak:.2e} of its mass");
    }
    Ok(energy_measure(u, eps)?.probe(y, s))
}
