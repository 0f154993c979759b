//! Marching squares on the zero level; `u ≥ 0` counts as positive.

use std::collections::{BTreeMap, BTreeSet};

use super::{cross, sub, Polyline};
use crate::field::ScalarField;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Edge {
    /// Between `(i, j)` and `(i + 1, j)`.
    H(usize, usize),
    /// Between `(i, j)` and `(i, j + 1)`.
    V(usize, usize),
}

fn crossing(u: &ScalarField, e: Edge) -> [f64; 2] {
    let g = u.grid();
    let (a, b) = match e {
        Edge::H(i, j) => ((i, j), (i + 1, j)),
        Edge::V(i, j) => ((i, j), (i, j + 1)),
    };
    let (va, vb) = (u.get(a.0, a.1), u.get(b.0, b.1));
    let t = va / (va - vb);
    let (pa, pb) = ([g.x(a.0), g.y(a.1)], [g.x(b.0), g.y(b.1)]);
    [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
}

/// Zero contours, one polyline per connected component, `u < 0` on the left.
///
/// Only cells inside the sample rectangle are contoured, so on periodic grids a
/// component crossing the seam is returned as open pieces.
pub fn extract_nodal_set(u: &ScalarField) -> Vec<Polyline> {
    let g = *u.grid();
    let mut next: BTreeMap<Edge, Edge> = BTreeMap::new();
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let v = [u.get(i, j), u.get(i + 1, j), u.get(i + 1, j + 1), u.get(i, j + 1)];
            let pos: Vec<bool> = v.iter().map(|&x| x >= 0.0).collect();
            let npos = pos.iter().filter(|&&p| p).count();
            if npos == 0 || npos == 4 {
                continue;
            }
            let corners = [[g.x(i), g.y(j)], [g.x(i + 1), g.y(j)], [g.x(i + 1), g.y(j + 1)], [g.x(i), g.y(j + 1)]];
            let edges = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            // Edge k joins corner k and corner k+1.
            let cut: Vec<usize> = (0..4).filter(|&k| pos[k] != pos[(k + 1) % 4]).collect();
            let mut segs: Vec<(usize, usize, usize)> = Vec::new();
            if cut.len() == 2 {
                let reference = (0..4).find(|&k| !pos[k]).expect("a negative corner");
                segs.push((cut[0], cut[1], reference));
            } else {
                let center_pos = v.iter().sum::<f64>() >= 0.0;
                for k in 0..4 {
                    // Isolate the corners whose sign differs from the centre.
                    if pos[k] != center_pos {
                        segs.push(((k + 3) % 4, k, k));
                    }
                }
            }
            for (ea, eb, c) in segs {
                let (pa, pb) = (crossing(u, edges[ea]), crossing(u, edges[eb]));
                if pa == pb {
                    continue;
                }
                let side = cross(sub(pb, pa), sub(corners[c], pa));
                let neg_left = if pos[c] { side < 0.0 } else { side > 0.0 };
                let (from, to) = if neg_left { (edges[ea], edges[eb]) } else { (edges[eb], edges[ea]) };
                next.insert(from, to);
            }
        }
    }
    let targets: BTreeSet<Edge> = next.values().copied().collect();
    let starts: Vec<Edge> = next.keys().copied().filter(|k| !targets.contains(k)).collect();
    let mut used: BTreeSet<Edge> = BTreeSet::new();
    let mut out = Vec::new();
    let walk = |start: Edge, used: &mut BTreeSet<Edge>| {
        let mut keys = vec![start];
        let mut cur = start;
        let mut closed = false;
        used.insert(start);
        while let Some(&n) = next.get(&cur) {
            if n == start {
                closed = true;
                break;
            }
            if !used.insert(n) {
                break;
            }
            keys.push(n);
            cur = n;
        }
        let mut pts: Vec<[f64; 2]> = Vec::with_capacity(keys.len());
        for k in keys {
            let p = crossing(u, k);
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        if closed {
            while pts.len() > 1 && pts.first() == pts.last() {
                pts.pop();
            }
        }
        let min = if closed { 3 } else { 2 };
        if pts.len() >= min {
            Some(Polyline::new_unchecked(pts, closed))
        } else {
            None
        }
    };
    for s in starts {
        if let Some(p) = walk(s, &mut used) {
            out.push(p);
        }
    }
    let rest: Vec<Edge> = next.keys().copied().collect();
    for s in rest {
        if !used.contains(&s) {
            if let Some(p) = walk(s, &mut used) {
                out.push(p);
            }
        }
    }
    out
}
