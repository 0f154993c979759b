//! Polyline CSV: `# closed=<bool>` (and optionally `# time=<t>`) comment lines,
//! then an `x,y` table.

use std::fs;
use std::path::Path;

use super::Polyline;
use crate::error::invalid;
use crate::Result;

pub fn write_polyline_csv(path: &Path, c: &Polyline, time: Option<f64>) -> Result<()> {
    let mut out = format!("# closed={}\n", c.closed());
    if let Some(t) = time {
        out.push_str(&format!("# time={t}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y"])?;
    for v in c.vertices() {
        w.write_record([v[0].to_string(), v[1].to_string()])?;
    }
    out.push_str(&String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"));
    fs::write(path, out)?;
    Ok(())
}

/// Returns the curve and the `time` header if present. A missing `closed` header means open.
pub fn read_polyline_csv(path: &Path) -> Result<(Polyline, Option<f64>)> {
    let text = fs::read_to_string(path)?;
    let (mut closed, mut time) = (false, None);
    for line in text.lines().filter_map(|l| l.trim().strip_prefix('#')) {
        let Some((k, v)) = line.trim().split_once('=') else { continue };
        match k.trim() {
            "closed" => closed = v.trim().parse().or_else(|_| invalid(format!("bad closed flag {v:?}")))?,
            "time" => time = Some(v.trim().parse().or_else(|_| invalid(format!("bad time {v:?}")))?),
            _ => {}
        }
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut vertices = Vec::new();
    for rec in r.deserialize::<(f64, f64)>() {
        let (x, y) = rec?;
        vertices.push([x, y]);
    }
    Ok((Polyline::new(vertices, closed)?, time))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let c = Polyline::circle([0.1, -0.2], 0.3, 37).unwrap();
        write_polyline_csv(&p, &c, Some(0.0125)).unwrap();
        let (d, t) = read_polyline_csv(&p).unwrap();
        assert_eq!(t, Some(0.0125));
        assert!(d.closed());
        assert_eq!(c.vertices(), d.vertices());
    }

    #[test]
    fn open_without_time() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.csv");
        fs::write(&p, "x,y\n0,0\n1,0.5\n").unwrap();
        let (d, t) = read_polyline_csv(&p).unwrap();
        assert_eq!(t, None);
        assert!(!d.closed());
        assert_eq!(d.len(), 2);
    }
}
