//! Level curves, their signed curvature, and the `|H_L| <= |k|/(2 sqrt 2)` audit.
//!
//! Level curves are oriented so that the left normal of the traversal direction
//! points toward decreasing `u`. With that orientation the signed curvature is
//!
//! ```text
//! k = (u_xx u_y^2 - 2 u_xy u_x u_y + u_yy u_x^2) / |Du|^3,
//! ```
//!
//! which is `+1/r` on the circles of `u = (x^2 + y^2)/2`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::curvature::mean_curvature_l;
use crate::error::{Error, Result};
use crate::field::{Jet2, ScalarField, DEFAULT_DELTA_SPACE};
use crate::grid::Grid2;
use crate::INV_TWO_SQRT_TWO;

pub fn implicit_curvature(j: &Jet2) -> Result<f64> {
    let [p, q] = j.du;
    let [uxx, uxy, uyy] = j.d2u;
    let g = j.grad_norm();
    if g == 0.0 {
        return Err(Error::VanishingGradient);
    }
    Ok((uxx * q * q - 2.0 * uxy * p * q + uyy * p * p) / (g * g * g))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelCurve {
    pub level: f64,
    pub vertices: Vec<[f64; 2]>,
    pub closed: bool,
    /// Signed curvature at each vertex, from the jet of the nearest interior node.
    pub curvature: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelOptions {
    /// Vertices whose nearest-node gradient is below this are dropped.
    pub tau_grad: f64,
}

impl Default for LevelOptions {
    fn default() -> Self {
        LevelOptions { tau_grad: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum EdgeId {
    /// `(i, j)-(i+1, j)`
    H(usize, usize),
    /// `(i, j)-(i, j+1)`
    V(usize, usize),
}

impl EdgeId {
    fn nodes(self) -> [(usize, usize); 2] {
        match self {
            EdgeId::H(i, j) => [(i, j), (i + 1, j)],
            EdgeId::V(i, j) => [(i, j), (i, j + 1)],
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    start: EdgeId,
    end: EdgeId,
}

fn crossing(g: &Grid2, field: &ScalarField, e: EdgeId, level: f64) -> [f64; 2] {
    let [(i0, j0), (i1, j1)] = e.nodes();
    let (a, b) = (field.at(i0, j0), field.at(i1, j1));
    let t = (level - a) / (b - a);
    let (x0, y0) = g.point(i0, j0);
    let (x1, y1) = g.point(i1, j1);
    [x0 + t * (x1 - x0), y0 + t * (y1 - y0)]
}

/// Marching squares on cells whose four corners are in the domain. Saddle cells
/// are resolved by the cell-centre average.
pub fn extract_levels(field: &ScalarField, level: f64) -> Vec<LevelCurve> {
    extract_levels_with(field, level, &LevelOptions::default())
}

pub fn extract_levels_with(
    field: &ScalarField,
    level: f64,
    opts: &LevelOptions,
) -> Vec<LevelCurve> {
    let (lo, hi) = field.range();
    if !(level > lo && level < hi) {
        return Vec::new();
    }
    let g = *field.grid();
    let mask = field.mask();
    let mut points: HashMap<EdgeId, [f64; 2]> = HashMap::new();
    let mut segments: Vec<Segment> = Vec::new();

    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            if !(mask.is_active(i, j)
                && mask.is_active(i + 1, j)
                && mask.is_active(i, j + 1)
                && mask.is_active(i + 1, j + 1))
            {
                continue;
            }
            // corners counter-clockwise from (i, j)
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals = corners.map(|(a, b)| field.at(a, b));
            let above = vals.map(|v| v >= level);
            // edge k joins corner k and corner k+1
            let edges = [
                EdgeId::H(i, j),
                EdgeId::V(i + 1, j),
                EdgeId::H(i, j + 1),
                EdgeId::V(i, j),
            ];
            let crossed: Vec<usize> = (0..4).filter(|&k| above[k] != above[(k + 1) % 4]).collect();
            // (edge, edge, corners on the decreasing side)
            let mut cell_segments: Vec<(usize, usize, Vec<usize>)> = Vec::new();
            match crossed.len() {
                0 => continue,
                2 => {
                    let below: Vec<usize> = (0..4).filter(|&k| !above[k]).collect();
                    cell_segments.push((crossed[0], crossed[1], below));
                }
                4 => {
                    let centre_above = vals.iter().sum::<f64>() / 4.0 >= level;
                    // Each segment cuts off one corner: corner k is bounded by edges k-1 and k.
                    // The corners cut off are those on the side that is not connected through the centre.
                    for k in 0..4 {
                        if above[k] != centre_above {
                            cell_segments.push(((k + 3) % 4, k, vec![k]));
                        }
                    }
                }
                _ => unreachable!("a cell crosses an even number of edges"),
            }
            for (ea, eb, below) in cell_segments {
                let (ida, idb) = (edges[ea], edges[eb]);
                let pa = *points
                    .entry(ida)
                    .or_insert_with(|| crossing(&g, field, ida, level));
                let pb = *points
                    .entry(idb)
                    .or_insert_with(|| crossing(&g, field, idb, level));
                // a cut-off corner lies on the decreasing side iff it is below the level
                let sign = if below.iter().all(|&k| !above[k]) {
                    1.0
                } else {
                    -1.0
                };
                let (cx, cy) = below.iter().fold((0.0, 0.0), |(sx, sy), &k| {
                    let (x, y) = g.point(corners[k].0, corners[k].1);
                    (sx + x / below.len() as f64, sy + y / below.len() as f64)
                });
                let cross = (pb[0] - pa[0]) * (cy - pa[1]) - (pb[1] - pa[1]) * (cx - pa[0]);
                let seg = if sign * cross > 0.0 {
                    Segment {
                        start: ida,
                        end: idb,
                    }
                } else {
                    Segment {
                        start: idb,
                        end: ida,
                    }
                };
                segments.push(seg);
            }
        }
    }

    let by_start: HashMap<EdgeId, usize> = segments
        .iter()
        .enumerate()
        .map(|(k, s)| (s.start, k))
        .collect();
    let has_pred: std::collections::HashSet<EdgeId> = segments.iter().map(|s| s.end).collect();
    let mut used = vec![false; segments.len()];
    let mut chains: Vec<(Vec<EdgeId>, bool)> = Vec::new();

    let walk = |first: usize, used: &mut Vec<bool>| -> (Vec<EdgeId>, bool) {
        let mut ids = vec![segments[first].start];
        let mut cur = first;
        loop {
            used[cur] = true;
            let end = segments[cur].end;
            ids.push(end);
            match by_start.get(&end) {
                Some(&next) if !used[next] => cur = next,
                Some(&next) if next == first => return (ids, true),
                _ => return (ids, false),
            }
        }
    };
    for k in 0..segments.len() {
        if !used[k] && !has_pred.contains(&segments[k].start) {
            chains.push(walk(k, &mut used));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            chains.push(walk(k, &mut used));
        }
    }

    let mut curves = Vec::new();
    for (ids, closed) in chains {
        let kappa: Vec<Option<f64>> = ids
            .iter()
            .map(|&e| vertex_curvature(field, e, &points, opts.tau_grad))
            .collect();
        let verts: Vec<[f64; 2]> = ids.iter().map(|e| points[e]).collect();
        split_valid(level, &verts, &kappa, closed, &mut curves);
    }
    curves
}

fn vertex_curvature(
    field: &ScalarField,
    e: EdgeId,
    points: &HashMap<EdgeId, [f64; 2]>,
    tau_grad: f64,
) -> Option<f64> {
    let g = field.grid();
    let p = points[&e];
    let mut best: Option<((usize, usize), f64)> = None;
    for (i, j) in e.nodes() {
        if !field.mask().is_interior(i, j) {
            continue;
        }
        let (x, y) = g.point(i, j);
        let d = (x - p[0]).hypot(y - p[1]);
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some(((i, j), d));
        }
    }
    let ((i, j), _) = best?;
    let jet = field.jet_unchecked(i, j);
    if jet.grad_norm() < tau_grad {
        return None;
    }
    implicit_curvature(&jet).ok()
}

fn split_valid(
    level: f64,
    verts: &[[f64; 2]],
    kappa: &[Option<f64>],
    closed: bool,
    out: &mut Vec<LevelCurve>,
) {
    // closed chains repeat the first vertex at the end
    let n = if closed { verts.len() - 1 } else { verts.len() };
    if kappa[..n].iter().all(Option::is_some) {
        out.push(LevelCurve {
            level,
            vertices: verts.to_vec(),
            closed,
            curvature: kappa.iter().map(|k| k.unwrap()).collect(),
        });
        return;
    }
    // start right after an excluded vertex so wrap-around runs stay whole
    let start = if closed {
        (0..n).find(|&k| kappa[k].is_none()).map_or(0, |k| k + 1)
    } else {
        0
    };
    let len = n;
    let mut run: Vec<usize> = Vec::new();
    let mut flush = |run: &mut Vec<usize>| {
        if run.len() >= 2 {
            out.push(LevelCurve {
                level,
                vertices: run.iter().map(|&k| verts[k]).collect(),
                closed: false,
                curvature: run.iter().map(|&k| kappa[k].unwrap()).collect(),
            });
        }
        run.clear();
    };
    for step in 0..len {
        let k = if closed { (start + step) % n } else { step };
        if kappa[k].is_some() {
            run.push(k);
        } else {
            flush(&mut run);
        }
    }
    flush(&mut run);
}

/// Discrete signed (Menger) curvature at each vertex, positive for left turns.
/// End vertices of open curves and degenerate triples give `None`.
pub fn polyline_curvature(curve: &LevelCurve) -> Vec<Option<f64>> {
    let v = &curve.vertices;
    let n = v.len();
    let m = if curve.closed { n - 1 } else { n };
    (0..n)
        .map(|k| {
            let (a, b) = if curve.closed {
                let kk = k % m;
                ((kk + m - 1) % m, (kk + 1) % m)
            } else {
                if k == 0 || k + 1 == n {
                    return None;
                }
                (k - 1, k + 1)
            };
            let (p0, p1, p2) = (v[a], v[k % m.max(1)], v[b]);
            let (ax, ay) = (p1[0] - p0[0], p1[1] - p0[1]);
            let (bx, by) = (p2[0] - p1[0], p2[1] - p1[1]);
            let la = ax.hypot(ay);
            let lb = bx.hypot(by);
            let lc = (p2[0] - p0[0]).hypot(p2[1] - p0[1]);
            let denom = la * lb * lc;
            (denom > 1e-300).then(|| 2.0 * (ax * by - ay * bx) / denom)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    /// `max (|H_L| - |k|/(2 sqrt 2))` over audited nodes.
    pub max_violation: Option<f64>,
    pub location: Option<[f64; 2]>,
    pub audited: usize,
    pub excluded: usize,
    pub exceed_count: usize,
    pub tolerance: f64,
    pub tau_grad: f64,
}

/// Default gradient cut-off for the audit: one cell's worth of gradient change.
pub fn default_audit_tau_grad(field: &ScalarField) -> f64 {
    let hess = field
        .jets()
        .iter()
        .flatten()
        .map(Jet2::hess_max_abs)
        .fold(0.0, f64::max);
    field.grid().h_max() * hess
}

/// Evaluates `|H_L| - |k|/(2 sqrt 2)` at interior nodes with `|Du| >= tau_grad`.
pub fn audit_inequality_1(
    field: &ScalarField,
    tau_grad: f64,
    tolerance: f64,
) -> Result<AuditReport> {
    let max_grad = field.max_grad_norm();
    if max_grad >= 1.0 - DEFAULT_DELTA_SPACE {
        return Err(Error::NonSpacelike { max_grad });
    }
    let g = field.grid();
    let mut rep = AuditReport {
        max_violation: None,
        location: None,
        audited: 0,
        excluded: 0,
        exceed_count: 0,
        tolerance,
        tau_grad,
    };
    for (i, j) in field.mask().interior_nodes() {
        let jet = field.jet_unchecked(i, j);
        if jet.grad_norm() < tau_grad || jet.grad_norm() == 0.0 {
            rep.excluded += 1;
            continue;
        }
        let v = mean_curvature_l(&jet)?.abs() - implicit_curvature(&jet)?.abs() * INV_TWO_SQRT_TWO;
        rep.audited += 1;
        if v > tolerance {
            rep.exceed_count += 1;
        }
        if rep.max_violation.map_or(true, |m| v > m) {
            rep.max_violation = Some(v);
            let (x, y) = g.point(i, j);
            rep.location = Some([x, y]);
        }
    }
    Ok(rep)
}

/// SVG rendering of level curves over the grid extent (y axis up).
pub fn to_svg(grid: &Grid2, curves: &[LevelCurve], width_px: f64) -> String {
    let (w, h) = (
        grid.hx * (grid.nx - 1) as f64,
        grid.hy * (grid.ny - 1) as f64,
    );
    let height_px = width_px * h / w;
    let sx = width_px / w;
    let map = |p: &[f64; 2]| ((p[0] - grid.x0) * sx, height_px - (p[1] - grid.y0) * sx);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width_px:.0}" height="{height_px:.0}" viewBox="0 0 {width_px:.3} {height_px:.3}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for c in curves {
        let pts: Vec<String> = c
            .vertices
            .iter()
            .map(|p| {
                let (x, y) = map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let tag = if c.closed { "polygon" } else { "polyline" };
        let _ = writeln!(
            s,
            r#"<{tag} data-level="{}" points="{}" fill="none" stroke="black" stroke-width="1"/>"#,
            c.level,
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}
