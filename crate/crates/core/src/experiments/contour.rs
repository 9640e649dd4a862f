//! Marching squares on a rectangular grid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Scalar field sampled on the tensor grid `xs × ys`, stored row by row:
/// `values[iy * xs.len() + ix]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
}

impl Surface {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, values: Vec<f64>) -> Result<Self, String> {
        if xs.len() < 2 || ys.len() < 2 {
            return Err("surface needs at least a 2x2 grid".into());
        }
        if values.len() != xs.len() * ys.len() {
            return Err(format!("expected {} values, got {}", xs.len() * ys.len(), values.len()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || ys.windows(2).any(|w| !(w[1] > w[0])) {
            return Err("grid coordinates must be strictly increasing".into());
        }
        Ok(Surface { xs, ys, values })
    }

    pub fn from_fn(xs: Vec<f64>, ys: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).map(|(x, y)| f(x, y)).collect();
        Surface::new(xs, ys, values).expect("valid grid")
    }

    fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.xs.len() + ix]
    }
}

/// A connected piece of a level set; closed loops repeat their first point at
/// the end.
pub type Polyline = Vec<(f64, f64)>;

// grid edge carrying a crossing: (ix, iy, vertical?)
type Edge = (usize, usize, bool);

/// Level-set polylines of `surface` at `level`. Empty when the level is
/// outside the data range or the surface is constant. Cells with a NaN
/// corner are skipped.
pub fn contour_extract(surface: &Surface, level: f64) -> Vec<Polyline> {
    let (nx, ny) = (surface.xs.len(), surface.ys.len());
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let v = [
                surface.at(ix, iy),
                surface.at(ix + 1, iy),
                surface.at(ix + 1, iy + 1),
                surface.at(ix, iy + 1),
            ];
            if v.iter().any(|x| x.is_nan()) {
                continue;
            }
            let case = v.iter().enumerate().fold(0u8, |acc, (k, &x)| acc | (((x >= level) as u8) << k));
            // cell edges: bottom, right, top, left
            let bottom = (ix, iy, false);
            let right = (ix + 1, iy, true);
            let top = (ix, iy + 1, false);
            let left = (ix, iy, true);
            let centre_above = v.iter().sum::<f64>() / 4.0 >= level;
            let pairs: &[(Edge, Edge)] = match case {
                0 | 15 => &[],
                1 | 14 => &[(left, bottom)],
                2 | 13 => &[(bottom, right)],
                3 | 12 => &[(left, right)],
                4 | 11 => &[(right, top)],
                6 | 9 => &[(bottom, top)],
                7 | 8 => &[(left, top)],
                5 if centre_above => &[(left, top), (bottom, right)],
                5 => &[(left, bottom), (right, top)],
                10 if centre_above => &[(left, bottom), (right, top)],
                10 => &[(left, top), (bottom, right)],
                _ => unreachable!(),
            };
            segments.extend_from_slice(pairs);
        }
    }
    link(surface, level, &segments)
}

fn crossing(surface: &Surface, level: f64, (ix, iy, vertical): Edge) -> (f64, f64) {
    let (jx, jy) = if vertical { (ix, iy + 1) } else { (ix + 1, iy) };
    let (a, b) = (surface.at(ix, iy), surface.at(jx, jy));
    let t = if b == a { 0.5 } else { ((level - a) / (b - a)).clamp(0.0, 1.0) };
    let x = surface.xs[ix] + t * (surface.xs[jx] - surface.xs[ix]);
    let y = surface.ys[iy] + t * (surface.ys[jy] - surface.ys[iy]);
    (x, y)
}

fn link(surface: &Surface, level: f64, segments: &[(Edge, Edge)]) -> Vec<Polyline> {
    let mut by_edge: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        by_edge.entry(*a).or_default().push(s);
        by_edge.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start_seg: usize, start_edge: Edge, used: &mut Vec<bool>| -> Vec<Edge> {
        let mut chain = vec![start_edge];
        let (mut seg, mut edge) = (start_seg, start_edge);
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == edge { b } else { a };
            chain.push(next);
            match by_edge[&next].iter().find(|&&s| !used[s]) {
                Some(&s) => {
                    seg = s;
                    edge = next;
                }
                None => break,
            }
        }
        chain
    };

    // open chains start at boundary edges touched by a single segment
    let starts: Vec<(Edge, usize)> =
        by_edge.iter().filter(|(_, segs)| segs.len() == 1).map(|(e, segs)| (*e, segs[0])).collect();
    for (edge, seg) in starts {
        if !used[seg] {
            lines.push(walk(seg, edge, &mut used));
        }
    }
    for seg in 0..segments.len() {
        if !used[seg] {
            lines.push(walk(seg, segments[seg].0, &mut used));
        }
    }
    lines.into_iter().map(|chain| chain.into_iter().map(|e| crossing(surface, level, e)).collect()).collect()
}
