//! Snapshot files: `<stem>.json` metadata next to `<stem>.bin` raw little-endian f64 samples.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Boundary, GridSpec, ScalarField};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub boundary: Boundary,
    pub time: f64,
    pub kind: String,
    pub payload: String,
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

pub fn write_snapshot(field: &ScalarField, kind: &str, stem: &Path) -> Result<()> {
    let g = field.grid();
    let bin = with_ext(stem, ".bin");
    let meta = SnapshotMeta {
        nx: g.nx,
        ny: g.ny,
        x0: g.x0,
        y0: g.y0,
        x1: g.x1,
        y1: g.y1,
        boundary: g.boundary,
        time: field.time(),
        kind: kind.to_string(),
        payload: bin.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    let mut bytes = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(&bin, bytes)?;
    fs::write(with_ext(stem, ".json"), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// Read a snapshot given its stem or either of its two file paths.
pub fn read_snapshot(path: &Path) -> Result<(ScalarField, SnapshotMeta)> {
    let stem = match path.extension().and_then(|e| e.to_str()) {
        Some("json") | Some("bin") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let meta: SnapshotMeta = serde_json::from_str(&fs::read_to_string(with_ext(&stem, ".json"))?)?;
    let grid = GridSpec::new(meta.nx, meta.ny, [meta.x0, meta.y0], [meta.x1, meta.y1], meta.boundary)?;
    let bytes = fs::read(with_ext(&stem, ".bin"))?;
    if bytes.len() != 8 * grid.len() {
        return Err(Error::InvalidField(format!(
            "payload has {} bytes, expected {}",
            bytes.len(),
            8 * grid.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let field = ScalarField::new(grid, values, meta.time)?;
    Ok((field, meta))
}
