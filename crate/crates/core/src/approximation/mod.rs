//! The approximation layer in profile units: Fermi coordinates around a
//! reference curve, the optimal shift `h` making `φ = u − ḡ(z − h)`
//! orthogonal to `ḡ′(z − h)` on every normal line, and norms of `φ`.
//!
//! Offsets `z` are measured in units of `ε` along the right normal (toward
//! `u > 0`); arclength `y` is also divided by `ε`.

mod frame;
mod phi;
mod shift;

pub use frame::{fermi_coordinates, sample_normal_lines, FermiFrame, NormalSamples, SAMPLES_PER_UNIT};
pub use phi::{phi_report, PhiReport};
pub use shift::{build_gstar, solve_optimal_shift, ShiftField};

use crate::field::{Boundary, GridSpec, ScalarField};
use crate::geometry::{extract_nodal_set, Polyline};
use crate::{Error, Result};

/// The full chain on one snapshot, framed on its longest nodal component.
#[derive(Debug, Clone)]
pub struct Approximation {
    pub frame: FermiFrame,
    pub samples: NormalSamples,
    pub shift: ShiftField,
    pub gstar: NormalSamples,
}

/// Distance in units of `ε` that framed vertices keep from a clamped wall.
pub const WALL_CLEARANCE: f64 = 4.0;

/// Frames the longest nodal component, resampled at spacing `ε/2`. On
/// clamped grids the reference is clipped to its longest run of vertices at
/// least `4ε` from the walls, and the extent is cut to the wall distance.
pub fn approximate_snapshot(u: &ScalarField, eps: f64) -> Result<Approximation> {
    let gamma = extract_nodal_set(u)
        .into_iter()
        .max_by(|a, b| a.length().total_cmp(&b.length()))
        .ok_or_else(|| Error::InvalidField(format!("no nodal set at t = {}", u.time())))?;
    let mut reference = resample_polyline(&gamma, 0.5 * eps)?;
    let grid = u.grid();
    let mut frame = if grid.boundary == Boundary::Dirichlet {
        reference = clip_to_interior(&reference, grid, WALL_CLEARANCE * eps)?;
        let reach = reference.vertices().iter().map(|p| wall_distance(grid, *p)).fold(f64::INFINITY, f64::min) / eps;
        let f = FermiFrame::new(&reference, eps)?;
        if reach < f.z_max {
            FermiFrame::with_extent(&reference, eps, reach)?
        } else {
            f
        }
    } else {
        FermiFrame::new(&reference, eps)?
    };
    frame.z_max = frame.z_max.max(1.0 / SAMPLES_PER_UNIT);
    let samples = sample_normal_lines(u, &frame);
    let shift = solve_optimal_shift(&samples, eps)?;
    let gstar = build_gstar(&samples, &shift)?;
    Ok(Approximation { frame, samples, shift, gstar })
}

fn wall_distance(g: &GridSpec, p: [f64; 2]) -> f64 {
    (p[0] - g.x0).min(g.x1 - p[0]).min(p[1] - g.y0).min(g.y1 - p[1])
}

/// Piecewise-linear resampling at spacing at most `ds`, uniform in arclength.
pub fn resample_polyline(c: &Polyline, ds: f64) -> Result<Polyline> {
    let v = c.vertices();
    let seg = c.segment_lengths();
    let total: f64 = seg.iter().sum();
    let cells = (total / ds).ceil().max(if c.closed() { 3.0 } else { 1.0 }) as usize;
    let step = total / cells as f64;
    let count = if c.closed() { cells } else { cells + 1 };
    let mut out = Vec::with_capacity(count);
    let (mut k, mut start) = (0, 0.0);
    for m in 0..count {
        let s = (m as f64 * step).min(total);
        while k + 1 < seg.len() && start + seg[k] < s {
            start += seg[k];
            k += 1;
        }
        let (a, b) = c.segment(k);
        let t = if seg[k] > 0.0 { ((s - start) / seg[k]).clamp(0.0, 1.0) } else { 0.0 };
        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }
    if !c.closed() {
        *out.last_mut().expect("nonempty") = v[v.len() - 1];
    }
    Polyline::new(out, c.closed())
}

/// Longest run of vertices at least `clearance` from the walls.
fn clip_to_interior(c: &Polyline, g: &GridSpec, clearance: f64) -> Result<Polyline> {
    let v = c.vertices();
    let n = v.len();
    let keep: Vec<bool> = v.iter().map(|p| wall_distance(g, *p) >= clearance).collect();
    if keep.iter().all(|k| *k) {
        return Ok(c.clone());
    }
    // For closed curves, start scanning just after a dropped vertex so runs do not wrap.
    let offset = if c.closed() { keep.iter().position(|k| !k).map_or(0, |i| i + 1) } else { 0 };
    let (mut best, mut cur) = ((0, 0), (0, 0));
    for m in 0..n {
        let i = (m + offset) % n;
        if keep[i] {
            if cur.1 == 0 {
                cur.0 = m;
            }
            cur.1 += 1;
            if cur.1 > best.1 {
                best = cur;
            }
        } else {
            cur.1 = 0;
        }
    }
    if best.1 < 8 {
        return Err(Error::InvalidField(format!("nodal set has fewer than 8 vertices {clearance} away from the walls")));
    }
    Polyline::new((best.0..best.0 + best.1).map(|m| v[(m + offset) % n]).collect(), false)
}
