//! FFT helpers: Fourier derivatives on periodic grids and a sine-transform
//! diagonalisation of the 5-point Laplacian with homogeneous Dirichlet data.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Boundary, GridSpec};
use crate::{Error, Result};

/// 2-D FFT on a periodic grid, rows along x.
pub struct SpectralPlan {
    nx: usize,
    ny: usize,
    fx: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
    kx: Vec<f64>,
    ky: Vec<f64>,
}

fn wavenumbers(n: usize, len: f64) -> Vec<f64> {
    (0..n)
        .map(|m| {
            let m = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
            2.0 * PI * m / len
        })
        .collect()
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    out.par_chunks_mut(rows).enumerate().for_each(|(c, col)| {
        for (r, o) in col.iter_mut().enumerate() {
            *o = src[r * cols + c];
        }
    });
    out
}

fn rows_fft(buf: &mut [Complex64], n: usize, f: &Arc<dyn Fft<f64>>) {
    buf.par_chunks_mut(n * 8).for_each(|chunk| f.process(chunk));
}

impl SpectralPlan {
    pub fn new(grid: &GridSpec) -> Result<Self> {
        if grid.boundary != Boundary::Periodic {
            return Err(Error::InvalidGrid("Fourier operators need a periodic grid".into()));
        }
        let mut p = FftPlanner::new();
        let [lx, ly] = grid.extent();
        Ok(Self {
            nx: grid.nx,
            ny: grid.ny,
            fx: p.plan_fft_forward(grid.nx),
            ix: p.plan_fft_inverse(grid.nx),
            fy: p.plan_fft_forward(grid.ny),
            iy: p.plan_fft_inverse(grid.ny),
            kx: wavenumbers(grid.nx, lx),
            ky: wavenumbers(grid.ny, ly),
        })
    }

    pub fn kx(&self) -> &[f64] {
        &self.kx
    }

    pub fn ky(&self) -> &[f64] {
        &self.ky
    }

    /// Forward transform; coefficient `(i, j)` is stored at `j * nx + i`.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        rows_fft(&mut buf, self.nx, &self.fx);
        let mut t = transpose(&buf, self.ny, self.nx);
        rows_fft(&mut t, self.ny, &self.fy);
        transpose(&t, self.nx, self.ny)
    }

    /// Inverse transform, normalised, real part.
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let mut t = transpose(spec, self.ny, self.nx);
        rows_fft(&mut t, self.ny, &self.iy);
        let mut buf = transpose(&t, self.nx, self.ny);
        rows_fft(&mut buf, self.nx, &self.ix);
        let scale = 1.0 / (self.nx * self.ny) as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Multiply coefficients by a real-valued symbol `m(kx, ky)` and invert.
    pub fn apply_symbol(&self, spec: &[Complex64], m: impl Fn(usize, usize) -> Complex64 + Sync) -> Vec<f64> {
        let nx = self.nx;
        let mut out = spec.to_vec();
        out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            for (i, c) in row.iter_mut().enumerate() {
                *c *= m(i, j);
            }
        });
        self.inverse(&out)
    }

    /// First-derivative wavenumbers with the unpaired Nyquist mode removed.
    pub(crate) fn odd_kx(&self, i: usize) -> f64 {
        if self.nx % 2 == 0 && i == self.nx / 2 {
            0.0
        } else {
            self.kx[i]
        }
    }

    pub(crate) fn odd_ky(&self, j: usize) -> f64 {
        if self.ny % 2 == 0 && j == self.ny / 2 {
            0.0
        } else {
            self.ky[j]
        }
    }
}

/// Sine transform (DST-I) along both axes of an `mx × my` interior block.
pub struct Dst2 {
    mx: usize,
    my: usize,
    fx: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
}

fn dst1_rows(buf: &mut [f64], m: usize, f: &Arc<dyn Fft<f64>>) {
    let n = 2 * (m + 1);
    buf.par_chunks_mut(m).for_each_init(
        || vec![Complex64::new(0.0, 0.0); n],
        |work, row| {
            work[0] = Complex64::new(0.0, 0.0);
            work[m + 1] = Complex64::new(0.0, 0.0);
            for (j, &v) in row.iter().enumerate() {
                work[j + 1] = Complex64::new(v, 0.0);
                work[n - 1 - j] = Complex64::new(-v, 0.0);
            }
            f.process(work);
            for (k, r) in row.iter_mut().enumerate() {
                *r = -0.5 * work[k + 1].im;
            }
        },
    );
}

fn transpose_real(src: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; src.len()];
    out.par_chunks_mut(rows).enumerate().for_each(|(c, col)| {
        for (r, o) in col.iter_mut().enumerate() {
            *o = src[r * cols + c];
        }
    });
    out
}

impl Dst2 {
    pub fn new(mx: usize, my: usize) -> Self {
        let mut p = FftPlanner::new();
        Self { mx, my, fx: p.plan_fft_forward(2 * (mx + 1)), fy: p.plan_fft_forward(2 * (my + 1)) }
    }

    /// Unnormalised DST-I along x then y, in place (row-major, rows of length `mx`).
    pub fn transform(&self, data: &mut Vec<f64>) {
        dst1_rows(data, self.mx, &self.fx);
        let mut t = transpose_real(data, self.my, self.mx);
        dst1_rows(&mut t, self.my, &self.fy);
        *data = transpose_real(&t, self.mx, self.my);
    }

    /// Factor turning [`Dst2::transform`] into its own inverse.
    pub fn inverse_scale(&self) -> f64 {
        4.0 / ((self.mx + 1) * (self.my + 1)) as f64
    }

    /// Eigenvalues of the 5-point Laplacian with zero boundary values, index `j * mx + i`.
    pub fn laplacian_eigenvalues(&self, hx: f64, hy: f64) -> Vec<f64> {
        let lx: Vec<f64> = (1..=self.mx)
            .map(|k| -4.0 / (hx * hx) * (PI * k as f64 / (2.0 * (self.mx + 1) as f64)).sin().powi(2))
            .collect();
        let ly: Vec<f64> = (1..=self.my)
            .map(|k| -4.0 / (hy * hy) * (PI * k as f64 / (2.0 * (self.my + 1) as f64)).sin().powi(2))
            .collect();
        let mut out = Vec::with_capacity(self.mx * self.my);
        for b in &ly {
            for a in &lx {
                out.push(a + b);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_roundtrip() {
        let g = GridSpec::new(12, 10, [0.0, 0.0], [1.0, 2.0], Boundary::Periodic).unwrap();
        let v: Vec<f64> = (0..g.len()).map(|k| ((k * 37) % 11) as f64 - 5.0).collect();
        let plan = SpectralPlan::new(&g).unwrap();
        let back = plan.inverse(&plan.forward(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dst_is_an_involution_up_to_scale() {
        let d = Dst2::new(7, 5);
        let v: Vec<f64> = (0..35).map(|k| (k as f64).sin()).collect();
        let mut w = v.clone();
        d.transform(&mut w);
        d.transform(&mut w);
        for (a, b) in v.iter().zip(&w) {
            assert!((a - b * d.inverse_scale()).abs() < 1e-12);
        }
    }

    #[test]
    fn dst_diagonalises_dirichlet_laplacian() {
        let (mx, my, hx, hy) = (6, 4, 0.3, 0.2);
        let d = Dst2::new(mx, my);
        let v: Vec<f64> = (0..mx * my).map(|k| (0.7 * k as f64).cos()).collect();
        let lap: Vec<f64> = (0..mx * my)
            .map(|k| {
                let (i, j) = ((k % mx) as isize, (k / mx) as isize);
                let at = |a: isize, b: isize| {
                    if a < 0 || b < 0 || a >= mx as isize || b >= my as isize {
                        0.0
                    } else {
                        v[b as usize * mx + a as usize]
                    }
                };
                (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (hx * hx)
                    + (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (hy * hy)
            })
            .collect();
        let mut s = v.clone();
        d.transform(&mut s);
        for (c, l) in s.iter_mut().zip(d.laplacian_eigenvalues(hx, hy)) {
            *c *= l * d.inverse_scale();
        }
        d.transform(&mut s);
        for (a, b) in lap.iter().zip(&s) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}
