use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    #[serde(rename = "periodic")]
    Periodic,
    /// Ghost values copy the nearest boundary sample; the solver holds boundary values fixed.
    #[serde(rename = "dirichlet-clamped")]
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub boundary: Boundary,
}

#[derive(Deserialize)]
struct RawGrid {
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    boundary: Boundary,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        GridSpec::new(r.nx, r.ny, [r.x0, r.y0], [r.x1, r.y1], r.boundary)
    }
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lo: [f64; 2], hi: [f64; 2], boundary: Boundary) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::InvalidGrid(format!("need nx, ny >= 4, got {nx} x {ny}")));
        }
        let finite = lo.iter().chain(hi.iter()).all(|v| v.is_finite());
        if !finite || !(hi[0] > lo[0]) || !(hi[1] > lo[1]) {
            return Err(Error::InvalidGrid(format!("bad corners {lo:?} .. {hi:?}")));
        }
        Ok(Self { nx, ny, x0: lo[0], y0: lo[1], x1: hi[0], y1: hi[1], boundary })
    }

    /// Grid with spacing at most `h` covering `[lo, hi]`.
    pub fn with_spacing(h: f64, lo: [f64; 2], hi: [f64; 2], boundary: Boundary) -> Result<Self> {
        let cells = |len: f64| (len / h - 1e-9).ceil().max(1.0) as usize;
        let (cx, cy) = (cells(hi[0] - lo[0]), cells(hi[1] - lo[1]));
        match boundary {
            Boundary::Periodic => Self::new(cx, cy, lo, hi, boundary),
            Boundary::Dirichlet => Self::new(cx + 1, cy + 1, lo, hi, boundary),
        }
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / self.cells_x() as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y1 - self.y0) / self.cells_y() as f64
    }

    pub fn h_max(&self) -> f64 {
        self.hx().max(self.hy())
    }

    fn cells_x(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.nx,
            Boundary::Dirichlet => self.nx - 1,
        }
    }

    fn cells_y(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.ny,
            Boundary::Dirichlet => self.ny - 1,
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy()
    }

    /// Row-major index: rows run along x, rows are stacked in y.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn point(&self, k: usize) -> [f64; 2] {
        [self.x(k % self.nx), self.y(k / self.nx)]
    }

    /// Neighbour index along x with the boundary rule applied.
    pub fn nbr_x(&self, i: usize, d: isize) -> usize {
        wrap(i, d, self.nx, self.boundary)
    }

    pub fn nbr_y(&self, j: usize, d: isize) -> usize {
        wrap(j, d, self.ny, self.boundary)
    }

    /// Side lengths of the region covered by the samples' cells.
    pub fn extent(&self) -> [f64; 2] {
        [self.x1 - self.x0, self.y1 - self.y0]
    }

    pub fn center(&self) -> [f64; 2] {
        [0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1)]
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    /// Same sample layout with corners scaled about the origin.
    pub fn dilated(&self, rho: f64) -> Result<Self> {
        Self::new(
            self.nx,
            self.ny,
            [rho * self.x0, rho * self.y0],
            [rho * self.x1, rho * self.y1],
            self.boundary,
        )
    }
}

fn wrap(i: usize, d: isize, n: usize, b: Boundary) -> usize {
    let k = i as isize + d;
    match b {
        Boundary::Periodic => k.rem_euclid(n as isize) as usize,
        Boundary::Dirichlet => k.clamp(0, n as isize - 1) as usize,
    }
}

/// Real samples on a [`GridSpec`] at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
    time: f64,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at index {k}")));
        }
        if !time.is_finite() {
            return Err(Error::InvalidField("non-finite time".into()));
        }
        Ok(Self { grid, values, time })
    }

    /// Construction without the finiteness scan, for values produced by this crate.
    pub(crate) fn from_parts(grid: GridSpec, values: Vec<f64>, time: f64) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values, time }
    }

    pub fn from_fn(grid: GridSpec, time: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|k| {
                let [x, y] = grid.point(k);
                f(x, y)
            })
            .collect();
        Self::new(grid, values, time)
    }

    pub fn constant(grid: GridSpec, c: f64, time: f64) -> Self {
        Self::from_parts(grid, vec![c; grid.len()], time)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect(), self.time)
    }

    /// Grid sum times cell area.
    pub fn integral(&self) -> f64 {
        kahan_sum(&self.values) * self.grid.cell_area()
    }
}

/// Compensated sum; fixed summation order keeps results bit-reproducible.
pub(crate) fn kahan_sum(v: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for &x in v {
        let y = x - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}
