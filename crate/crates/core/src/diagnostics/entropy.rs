use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::energy_measure;
use crate::error::invalid;
use crate::field::ScalarField;
use crate::numerics::{golden_max, logspace};
use crate::profile::ALPHA;
use crate::{Error, Result};

/// A nonnegative measure that can be integrated against `(4πs)^{−1/2} e^{−|x−y|²/4s}`.
pub trait GaussianMeasure: Sync {
    /// Corners of the region carrying the measure.
    fn bounds(&self) -> [[f64; 2]; 2];
    /// Densities at every `(cx[a], cy[b])`, stored at `b * cx.len() + a`.
    fn probe_grid(&self, cx: &[f64], cy: &[f64], s: f64) -> Vec<f64>;
    fn probe(&self, y: [f64; 2], s: f64) -> f64 {
        self.probe_grid(&[y[0]], &[y[1]], s)[0]
    }
    /// Fraction of kernel mass outside the represented region.
    fn leakage(&self, y: [f64; 2], s: f64) -> f64;
    /// Default `[s_min, s_max]` for the scale grid.
    fn default_scales(&self) -> [f64; 2];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpec {
    /// Centres per axis on a cell-centred grid over the window.
    pub centers: usize,
    pub n_scales: usize,
    /// `[s_min, s_max]`; the measure's default when absent.
    pub scales: Option<[f64; 2]>,
    pub n_dilations: usize,
    pub dilations: [f64; 2],
    /// Golden-section refinement in `s`, then in each centre coordinate.
    pub refine: bool,
    /// Report `raw/α`.
    pub normalize: bool,
    pub leak_tolerance: f64,
    /// Centre window `[lo, hi]`; the measure's bounds when absent.
    pub window: Option<[[f64; 2]; 2]>,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            centers: 16,
            n_scales: 24,
            scales: None,
            n_dilations: 8,
            dilations: [0.25, 4.0],
            refine: true,
            normalize: false,
            leak_tolerance: 1e-6,
            window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyResult {
    pub value: f64,
    pub raw: f64,
    pub normalized: bool,
    /// Maximizing centre, scale and dilation of the dilated configuration.
    pub y: [f64; 2],
    pub s: f64,
    pub rho: f64,
    pub probes: usize,
    pub leaking_probes: usize,
    /// Kernel leakage at the maximizer.
    pub leakage: f64,
}

fn cell_centres(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|a| lo + (a as f64 + 0.5) * (hi - lo) / n as f64).collect()
}

/// Probe-and-refine search for `sup_{y,s,ρ} ∫Ψ_{y,s} d(ρ-dilated measure)`.
///
/// Dilating by `ρ` (with `ε → ρε` for diffuse measures) maps the probe
/// `(y, s)` to `(y/ρ, s/ρ²)` on the undilated measure, so dilations are
/// evaluated by rescaling the kernel. Leaking probes are kept: truncating a
/// nonnegative measure only lowers the density, so they remain lower bounds.
pub fn entropy_search(m: &dyn GaussianMeasure, spec: &SearchSpec) -> Result<EntropyResult> {
    if spec.centers == 0 || spec.n_scales == 0 || spec.n_dilations == 0 {
        return invalid("entropy search grids must be nonempty");
    }
    let [s_lo, s_hi] = spec.scales.unwrap_or_else(|| m.default_scales());
    let [r_lo, r_hi] = spec.dilations;
    if !(s_lo > 0.0 && s_hi >= s_lo && r_lo > 0.0 && r_hi >= r_lo) {
        return invalid(format!("bad scale range [{s_lo}, {s_hi}] or dilation range [{r_lo}, {r_hi}]"));
    }
    let [lo, hi] = spec.window.unwrap_or_else(|| m.bounds());
    let cx = cell_centres(lo[0], hi[0], spec.centers);
    let cy = cell_centres(lo[1], hi[1], spec.centers);
    let scales = logspace(s_lo, s_hi, spec.n_scales);
    let rhos = logspace(r_lo, r_hi, spec.n_dilations);
    let jobs: Vec<(f64, f64)> = rhos.iter().flat_map(|&r| scales.iter().map(move |&s| (r, s))).collect();

    // Per job: best probe and leak count. Ties keep the earliest probe.
    let results: Vec<(f64, usize, usize)> = jobs
        .par_iter()
        .map(|&(rho, s)| {
            let sig = s / (rho * rho);
            let vals = m.probe_grid(&cx, &cy, sig);
            let mut best = (f64::NEG_INFINITY, 0);
            let mut leaks = 0;
            for (k, v) in vals.iter().enumerate() {
                let y = [cx[k % cx.len()], cy[k / cx.len()]];
                if m.leakage(y, sig) > spec.leak_tolerance {
                    leaks += 1;
                }
                if *v > best.0 {
                    best = (*v, k);
                }
            }
            (best.0, best.1, leaks)
        })
        .collect();
    let probes = jobs.len() * cx.len() * cy.len();
    let leaking: usize = results.iter().map(|r| r.2).sum();
    if leaking == probes {
        return Err(Error::AllProbesLeak);
    }
    if leaking > 0 {
        log::warn!("entropy: {leaking} of {probes} probes leak more than {:e} of the kernel mass", spec.leak_tolerance);
    }
    let mut bj = 0;
    for (j, r) in results.iter().enumerate() {
        if r.0 > results[bj].0 {
            bj = j;
        }
    }
    let (rho, s) = jobs[bj];
    let k = results[bj].1;
    let mut y = [cx[k % cx.len()], cy[k / cx.len()]];
    let mut sig = s / (rho * rho);
    let mut best = results[bj].0;

    if spec.refine {
        let s_ratio = if scales.len() > 1 { scales[1] / scales[0] } else { 2.0 };
        let dy = [(hi[0] - lo[0]) / spec.centers as f64, (hi[1] - lo[1]) / spec.centers as f64];
        for _ in 0..2 {
            let l = sig.ln();
            let (ls, v) = golden_max(&mut |t| m.probe(y, t.exp()), l - s_ratio.ln(), l + s_ratio.ln(), 40);
            if v > best {
                (best, sig) = (v, ls.exp());
            }
            for axis in 0..2 {
                let c = y[axis];
                let (p, v) = golden_max(
                    &mut |t| {
                        let mut q = y;
                        q[axis] = t;
                        m.probe(q, sig)
                    },
                    c - dy[axis],
                    c + dy[axis],
                    40,
                );
                if v > best {
                    best = v;
                    y[axis] = p;
                }
            }
        }
    }
    let leakage = m.leakage(y, sig);
    let value = if spec.normalize { best / ALPHA } else { best };
    Ok(EntropyResult {
        value,
        raw: best,
        normalized: spec.normalize,
        y: [rho * y[0], rho * y[1]],
        s: rho * rho * sig,
        rho,
        probes,
        leaking_probes: leaking,
        leakage,
    })
}

/// Entropy of the energy measure of `u`; default scales `[(4ε)², (side/4)²]`.
pub fn entropy(u: &ScalarField, eps: f64, search: &SearchSpec) -> Result<EntropyResult> {
    entropy_search(&energy_measure(u, eps)?, search)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::gaussian_density;
    use crate::field::{Boundary, GridSpec};
    use crate::geometry::Polyline;
    use crate::profile::CutoffProfile;
    use crate::solver::init_from_curve;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    const CIRCLE_FACTOR: f64 = 1.520_346_901_066_281; // √(2π/e)

    fn circle(eps: f64, n: usize, half: f64, r: f64) -> ScalarField {
        let g = GridSpec::new(n, n, [-half, -half], [half, half], Boundary::Periodic).unwrap();
        init_from_curve(&Polyline::circle([0.0, 0.0], r, 1024).unwrap(), eps, &g).unwrap()
    }

    fn shared_circle() -> &'static (ScalarField, EntropyResult) {
        static C: OnceLock<(ScalarField, EntropyResult)> = OnceLock::new();
        C.get_or_init(|| {
            let u = circle(0.04, 200, 1.0, 0.5);
            let e = entropy(&u, 0.04, &SearchSpec::default()).unwrap();
            (u, e)
        })
    }

    #[test]
    fn circle_factor_constant() {
        assert!((CIRCLE_FACTOR - (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn flat_wave_entropy_is_alpha() {
        let eps = 0.05;
        let p = CutoffProfile::new(eps).unwrap();
        let g = GridSpec::new(160, 160, [-1.0, -1.0], [1.0, 1.0], Boundary::Dirichlet).unwrap();
        let u = ScalarField::from_fn(g, 0.0, |_, y| p.eval_all(y / eps)[0]).unwrap();
        let e = entropy(&u, eps, &SearchSpec { normalize: true, ..Default::default() }).unwrap();
        assert!((e.value - 1.0).abs() < 0.02, "{e:?}");
        assert_eq!(e.value, e.raw / ALPHA);
    }

    #[test]
    fn circle_entropy() {
        let e = entropy(&circle(0.02, 400, 1.0, 0.5), 0.02, &SearchSpec::default()).unwrap();
        let want = ALPHA * CIRCLE_FACTOR;
        assert!((e.value - want).abs() < 0.03 * want, "{}", e.value / want);
    }

    #[test]
    fn dilation_invariance() {
        // u_2(x) = u(x/2) is the same layer at 2ε on a window twice as large.
        let (u, a) = shared_circle();
        let g2 = u.grid().dilated(2.0).unwrap();
        let u2 = ScalarField::new(g2, u.values().to_vec(), 0.0).unwrap();
        let b = entropy(&u2, 0.08, &SearchSpec::default()).unwrap();
        assert!((a.value - b.value).abs() < 0.01 * a.value, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn all_leaking_is_an_error() {
        let (u, _) = shared_circle();
        let spec = SearchSpec { scales: Some([50.0, 100.0]), dilations: [1.0, 1.0], n_dilations: 1, ..Default::default() };
        assert!(matches!(entropy(u, 0.04, &spec), Err(Error::AllProbesLeak)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn entropy_dominates_probes(x in -1.0..1.0f64, y in -1.0..1.0f64, ls in (0.0025f64).ln()..(1.0f64).ln()) {
            let (u, e) = shared_circle();
            let g = gaussian_density(u, 0.04, [x, y], ls.exp()).unwrap();
            prop_assert!(g <= e.raw * (1.0 + 1e-9), "{} > {}", g, e.raw);
        }
    }
}
