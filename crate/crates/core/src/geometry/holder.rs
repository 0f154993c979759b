use rayon::prelude::*;

use crate::error::invalid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderSample {
    pub point: [f64; 2],
    pub time: f64,
    pub value: f64,
}

fn parabolic_distance(a: &HolderSample, b: &HolderSample) -> f64 {
    let dx = (a.point[0] - b.point[0]).hypot(a.point[1] - b.point[1]);
    dx.max((a.time - b.time).abs().sqrt())
}

/// `max |v₁ − v₂| / dist_p^θ` over pairs with `dist_p ≥ min_sep`, where
/// `dist_p = max(|x₁ − x₂|, √|t₁ − t₂|)`.
///
/// Errors only when no pair is admissible; a single pair is enough.
pub fn parabolic_holder_seminorm(samples: &[HolderSample], theta: f64, min_sep: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return invalid(format!("theta must lie in (0, 1], got {theta}"));
    }
    if !(min_sep > 0.0) {
        return invalid(format!("min_sep must be positive, got {min_sep}"));
    }
    let (best, pairs) = (0..samples.len())
        .into_par_iter()
        .map(|i| {
            let a = &samples[i];
            samples[i + 1..].iter().fold((0.0f64, 0usize), |(m, c), b| {
                let d = parabolic_distance(a, b);
                if d >= min_sep {
                    (m.max((a.value - b.value).abs() / d.powf(theta)), c + 1)
                } else {
                    (m, c)
                }
            })
        })
        .reduce(|| (0.0, 0), |x, y| (x.0.max(y.0), x.1 + y.1));
    if pairs == 0 {
        return Err(Error::NoAdmissiblePairs(min_sep));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: f64, t: f64, v: f64) -> HolderSample {
        HolderSample { point: [x, 0.0], time: t, value: v }
    }

    #[test]
    fn constant_is_zero() {
        let v: Vec<_> = (0..10).map(|i| s(i as f64 * 0.1, 0.0, 3.0)).collect();
        assert_eq!(parabolic_holder_seminorm(&v, 0.5, 0.05).unwrap(), 0.0);
    }

    #[test]
    fn single_pair() {
        let v = [s(0.0, 0.0, 0.0), s(1.0, 0.0, 1.0)];
        assert_eq!(parabolic_holder_seminorm(&v, 0.5, 0.1).unwrap(), 1.0);
    }

    #[test]
    fn time_uses_square_root() {
        let v = [s(0.0, 0.0, 0.0), s(0.0, 0.25, 1.0)];
        assert!((parabolic_holder_seminorm(&v, 1.0, 0.1).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn square_root_profile() {
        // Brute-force oracle: sup over pairs including the origin is exactly 1.
        let v: Vec<_> = (0..=200).map(|i| {
            let x = -1.0 + 0.01 * i as f64;
            s(x, 0.0, x.abs().sqrt())
        }).collect();
        let got = parabolic_holder_seminorm(&v, 0.5, 0.02).unwrap();
        assert!((got - 1.0).abs() < 0.05, "{got}");
    }

    #[test]
    fn no_admissible_pair() {
        let v = [s(0.0, 0.0, 0.0), s(0.01, 0.0, 1.0)];
        assert!(matches!(parabolic_holder_seminorm(&v, 0.5, 0.1), Err(Error::NoAdmissiblePairs(_))));
        assert!(parabolic_holder_seminorm(&v, 0.0, 0.001).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_min_sep_and_homogeneous(
            pts in prop::collection::vec((-1.0..1.0f64, 0.0..0.1f64, -2.0..2.0f64), 3..30),
            sep in 0.001..0.3f64,
            c in 0.1..10.0f64,
        ) {
            let v: Vec<_> = pts.iter().map(|&(x, t, f)| s(x, t, f)).collect();
            let lo = parabolic_holder_seminorm(&v, 0.5, sep);
            let hi = parabolic_holder_seminorm(&v, 0.5, 2.0 * sep);
            if let (Ok(a), Ok(b)) = (&lo, &hi) {
                prop_assert!(b <= a);
            }
            if let Ok(a) = lo {
                let w: Vec<_> = v.iter().map(|p| HolderSample { value: c * p.value, ..*p }).collect();
                let b = parabolic_holder_seminorm(&w, 0.5, sep).unwrap();
                prop_assert!((b - c * a).abs() <= 1e-12 * (1.0 + c * a));
            }
        }
    }
}
