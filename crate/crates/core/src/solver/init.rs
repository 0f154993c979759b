use rayon::prelude::*;

use crate::field::{GridSpec, ScalarField};
use crate::geometry::{Polyline, SignedDistance};
use crate::profile::CutoffProfile;
use crate::{Error, Result};

/// `u₀(x) = ḡ(d(x)/ε)` with `d` the signed distance to the curve (positive on its right).
///
/// Open curves should run past the domain so that `d` has a clean sign everywhere.
pub fn init_from_curve(curve: &Polyline, eps: f64, grid: &GridSpec) -> Result<ScalarField> {
    let required = 2.0 * grid.h_max();
    if !(eps >= required) {
        return Err(Error::UnderResolved { eps, required });
    }
    if let Some((a, b)) = curve.find_self_intersection() {
        return Err(Error::SelfIntersecting(a, b));
    }
    let prof = CutoffProfile::new(eps)?;
    let sd = SignedDistance::new(curve);
    let values = (0..grid.len())
        .into_par_iter()
        .map(|k| prof.eval_all(sd.eval(grid.point(k)) / eps)[0])
        .collect();
    ScalarField::new(*grid, values, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Boundary;
    use crate::profile::heteroclinic;
    use crate::Order;

    #[test]
    fn horizontal_line() {
        // Runs right to left so that u > 0 lies above.
        let c = Polyline::new(vec![[2.0, 0.0], [-2.0, 0.0]], false).unwrap();
        let g = GridSpec::new(81, 81, [-1.0, -1.0], [1.0, 1.0], Boundary::Dirichlet).unwrap();
        let u = init_from_curve(&c, 0.05, &g).unwrap();
        let v = u.get(40, 42);
        assert!((g.y(42) - 0.05).abs() < 1e-15);
        assert!((v - heteroclinic(1.0, Order::Value)).abs() < 1e-12);
        assert!((v - 0.6089).abs() < 1e-4);
        assert_eq!(u.get(40, 40), 0.0);
        assert!(u.values().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn circle_centre_saturates() {
        let c = Polyline::circle([0.0, 0.0], 0.5, 256).unwrap();
        let g = GridSpec::new(81, 81, [-1.0, -1.0], [1.0, 1.0], Boundary::Dirichlet).unwrap();
        let u = init_from_curve(&c, 0.05, &g).unwrap();
        // d/ε = −10 sits inside the cutoff band, so ḡ is −1 only up to the tanh tail 2/(e^{10√2}+1).
        assert!((u.get(40, 40) + 1.0).abs() < 2e-6);
        assert_eq!(u.get(0, 0), 1.0);
    }

    #[test]
    fn rejects_under_resolution_and_crossings() {
        let g = GridSpec::new(21, 21, [-1.0, -1.0], [1.0, 1.0], Boundary::Dirichlet).unwrap();
        let c = Polyline::circle([0.0, 0.0], 0.5, 64).unwrap();
        assert!(matches!(init_from_curve(&c, 0.15, &g), Err(Error::UnderResolved { .. })));
        let bow = Polyline::new_unchecked(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]], true);
        assert!(matches!(init_from_curve(&bow, 0.3, &g), Err(Error::SelfIntersecting(..))));
    }
}
