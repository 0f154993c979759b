use std::path::Path;

use crate::Result;

/// Two-column plot data.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: &str, x_label: &str, y_label: &str, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), x_label: x_label.into(), y_label: y_label.into(), points }
    }
}

pub fn write_series(path: &Path, s: &Series) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([&s.x_label, &s.y_label])?;
    for (x, y) in &s.points {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
