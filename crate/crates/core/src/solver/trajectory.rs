use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SolverConfig;
use crate::field::{read_snapshot, write_snapshot, GridSpec, ScalarField};
use crate::{Error, Result};

/// Time-ordered snapshots on one grid, with the step index of each.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    snapshots: Vec<ScalarField>,
    steps: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Index {
    config: SolverConfig,
    grid: GridSpec,
    snapshots: Vec<Entry>,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    step: usize,
    time: f64,
    stem: String,
}

impl Trajectory {
    pub fn new(config: SolverConfig, snapshots: Vec<ScalarField>) -> Result<Self> {
        let steps = (0..snapshots.len()).collect();
        Self::with_steps(config, snapshots, steps)
    }

    pub fn with_steps(config: SolverConfig, snapshots: Vec<ScalarField>, steps: Vec<usize>) -> Result<Self> {
        if snapshots.is_empty() || steps.len() != snapshots.len() {
            return Err(Error::InvalidField("trajectory needs one step index per snapshot and at least one snapshot".into()));
        }
        let grid = snapshots[0].grid();
        for w in snapshots.windows(2) {
            if w[1].grid() != grid {
                return Err(Error::InvalidField("snapshots must share one grid".into()));
            }
            if !(w[1].time() > w[0].time()) {
                return Err(Error::InvalidField(format!("snapshot times not increasing: {} then {}", w[0].time(), w[1].time())));
            }
        }
        Ok(Self { config, snapshots, steps })
    }

    pub fn snapshots(&self) -> &[ScalarField] {
        &self.snapshots
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn grid(&self) -> &GridSpec {
        self.snapshots[0].grid()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(ScalarField::time).collect()
    }

    pub fn last(&self) -> &ScalarField {
        self.snapshots.last().expect("trajectory is never empty")
    }

    /// Index of the snapshot whose time is closest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, s) in self.snapshots.iter().enumerate() {
            if (s.time() - t).abs() < (self.snapshots[best].time() - t).abs() {
                best = i;
            }
        }
        best
    }

    /// Same states in reverse order at times `−t`.
    pub fn time_reversed(&self) -> Self {
        let last = *self.steps.last().expect("non-empty");
        Self {
            config: self.config.clone(),
            snapshots: self.snapshots.iter().rev().map(|s| s.clone().with_time(-s.time())).collect(),
            steps: self.steps.iter().rev().map(|k| last - k).collect(),
        }
    }

    /// First snapshot time at which the field has no sign change.
    pub fn extinction_time(&self) -> Option<f64> {
        self.snapshots
            .iter()
            .find(|s| {
                let v = s.values();
                !(v.iter().any(|x| *x < 0.0) && v.iter().any(|x| *x >= 0.0))
            })
            .map(ScalarField::time)
    }

    /// Writes `trajectory.json` plus one snapshot pair per state into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut entries = Vec::with_capacity(self.len());
        for (s, k) in self.snapshots.iter().zip(&self.steps) {
            let stem = format!("snap_{k:07}");
            write_snapshot(s, "u", &dir.join(&stem))?;
            entries.push(Entry { step: *k, time: s.time(), stem });
        }
        let index = Index { config: self.config.clone(), grid: *self.grid(), snapshots: entries };
        fs::write(dir.join("trajectory.json"), serde_json::to_string_pretty(&index)?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let index: Index = serde_json::from_str(&fs::read_to_string(dir.join("trajectory.json"))?)?;
        let mut snaps = Vec::with_capacity(index.snapshots.len());
        for e in &index.snapshots {
            let (f, _) = read_snapshot(&dir.join(&e.stem))?;
            if f.grid() != &index.grid {
                return Err(Error::InvalidField(format!("snapshot {} is on a different grid", e.stem)));
            }
            snaps.push(f);
        }
        Self::with_steps(index.config, snaps, index.snapshots.iter().map(|e| e.step).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Boundary;

    #[test]
    fn directory_roundtrip_is_bit_exact() {
        let g = GridSpec::new(9, 7, [0.0, 0.0], [1.0, 1.0], Boundary::Dirichlet).unwrap();
        let a = ScalarField::from_fn(g, 0.0, |x, y| (x * 3.1).sin() * y.exp()).unwrap();
        let b = a.map(|v| v / 3.0).unwrap().with_time(0.1);
        let t = Trajectory::with_steps(SolverConfig::new(0.3, 0.1), vec![a, b], vec![0, 7]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        t.save(dir.path()).unwrap();
        let r = Trajectory::load(dir.path()).unwrap();
        assert_eq!(r.steps(), t.steps());
        assert_eq!(r.config, t.config);
        for (x, y) in r.snapshots().iter().zip(t.snapshots()) {
            assert_eq!(x.time().to_bits(), y.time().to_bits());
            assert!(x.values().iter().zip(y.values()).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }

    #[test]
    fn rejects_unordered_times() {
        let g = GridSpec::new(4, 4, [0.0, 0.0], [1.0, 1.0], Boundary::Periodic).unwrap();
        let a = ScalarField::constant(g, 0.0, 0.2);
        let b = ScalarField::constant(g, 0.0, 0.1);
        assert!(Trajectory::new(SolverConfig::new(0.1, 1.0), vec![a, b]).is_err());
    }
}
