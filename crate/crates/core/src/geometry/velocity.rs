use super::{extract_nodal_set, Polyline, DEFAULT_GRAD_FLOOR};
use crate::error::invalid;
use crate::field::{derivatives, sample, DerivativeScheme, Interp};
use crate::solver::Trajectory;
use crate::Result;

/// Per-vertex values on the components of a nodal set; NaN marks masked vertices.
#[derive(Debug, Clone)]
pub struct NodalValues {
    pub polylines: Vec<Polyline>,
    pub values: Vec<Vec<f64>>,
}

impl NodalValues {
    /// Unmasked values across all components.
    pub fn finite(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().copied().filter(|v| !v.is_nan())
    }

    pub fn masked_count(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_nan()).count()
    }
}

/// Normal velocity `u_t/|∇u|` of the nodal set of snapshot `t_index`, along the
/// left normal (toward `u < 0`), from a centred difference of the neighbouring snapshots.
pub fn normal_velocity(traj: &Trajectory, t_index: usize) -> Result<NodalValues> {
    normal_velocity_with(traj, t_index, DEFAULT_GRAD_FLOOR, Interp::Bilinear)
}

pub fn normal_velocity_with(traj: &Trajectory, t_index: usize, grad_floor: f64, how: Interp) -> Result<NodalValues> {
    if t_index == 0 || t_index + 1 >= traj.len() {
        return invalid(format!("snapshot {t_index} lacks a neighbour on both sides (trajectory has {})", traj.len()));
    }
    let s = traj.snapshots();
    let (prev, cur, next) = (&s[t_index - 1], &s[t_index], &s[t_index + 1]);
    let dt = next.time() - prev.time();
    let grid = *cur.grid();
    let d = derivatives(cur, DerivativeScheme::auto(&grid), false)?;
    let gmax = (0..grid.len()).map(|k| d.grad_norm(k)).fold(0.0, f64::max);
    let v: Vec<f64> = (0..grid.len())
        .map(|k| {
            let g = d.grad_norm(k);
            if g > 0.0 && g >= grad_floor * gmax {
                (next.values()[k] - prev.values()[k]) / dt / g
            } else {
                f64::NAN
            }
        })
        .collect();
    let polylines = extract_nodal_set(cur);
    let values = polylines
        .iter()
        .map(|c| c.vertices().iter().map(|p| sample(&grid, &v, *p, how).unwrap_or(f64::NAN)).collect())
        .collect();
    Ok(NodalValues { polylines, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Boundary, GridSpec, ScalarField};
    use crate::profile::CutoffProfile;
    use crate::solver::SolverConfig;

    fn layer(g: GridSpec, eps: f64, f: impl Fn(f64, f64) -> f64, t: f64) -> ScalarField {
        let p = CutoffProfile::new(eps).unwrap();
        ScalarField::from_fn(g, t, |x, y| p.eval_all(f(x, y) / eps)[0]).unwrap()
    }

    #[test]
    fn static_layer_has_zero_velocity() {
        let g = GridSpec::new(16, 128, [0.0, -1.0], [0.25, 1.0], Boundary::Periodic).unwrap();
        let snaps = (0..3).map(|k| layer(g, 0.05, |_, y| y, 0.01 * k as f64)).collect();
        let t = Trajectory::new(SolverConfig::new(0.05, 0.02), snaps).unwrap();
        let nv = normal_velocity(&t, 1).unwrap();
        assert!(nv.finite().count() > 0);
        assert!(nv.finite().all(|v| v.abs() <= 1e-3));
    }

    #[test]
    fn prescribed_circle_motion() {
        // Synthetic layers around circles of radius r(t) = √(r0² − 2t): exact speed 1/r inward.
        let (eps, r0) = (0.04, 0.5);
        let g = GridSpec::new(200, 200, [-1.0, -1.0], [1.0, 1.0], Boundary::Periodic).unwrap();
        let r = |t: f64| (r0 * r0 - 2.0 * t).sqrt();
        let snaps = [0.049, 0.05, 0.051].iter().map(|&t| layer(g, eps, |x, y| x.hypot(y) - r(t), t)).collect();
        let traj = Trajectory::new(SolverConfig::new(eps, 0.051), snaps).unwrap();
        let nv = normal_velocity(&traj, 1).unwrap();
        let want = 1.0 / r(0.05);
        assert!(nv.masked_count() == 0);
        assert!(nv.finite().all(|v| (v - want).abs() < 0.1 * want));
        let back = normal_velocity(&traj.time_reversed(), 1).unwrap();
        for (a, b) in nv.finite().zip(back.finite()) {
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn endpoints_are_rejected() {
        let g = GridSpec::new(8, 8, [0.0, 0.0], [1.0, 1.0], Boundary::Periodic).unwrap();
        let s = vec![ScalarField::constant(g, 0.0, 0.0), ScalarField::constant(g, 0.0, 1.0)];
        let t = Trajectory::new(SolverConfig::new(0.1, 1.0), s).unwrap();
        assert!(normal_velocity(&t, 0).is_err());
        assert!(normal_velocity(&t, 1).is_err());
    }
}
