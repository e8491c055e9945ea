//! Staggered (face-centred) gradients and conservative divergences.
//!
//! On the x-face between nodes `(i, j)` and `(i+1, j)` the normal derivative is the
//! two-point difference and the tangential derivative averages the centred
//! y-differences of both endpoints. Only faces touching an interior node are
//! evaluated; all nodes they reference are in the domain.

use crate::grid::{DomainMask, Grid2, NodeKind};

/// Face gradient data: normal difference and squared gradient norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceGradient {
    pub normal: f64,
    pub s: f64,
}

/// Gradients on all faces touching an interior node. Index `grid.idx(i, j)` of
/// `x` is the face `(i, j)-(i+1, j)`; of `y` the face `(i, j)-(i, j+1)`.
#[derive(Debug, Clone)]
pub struct FaceGradients {
    pub x: Vec<Option<FaceGradient>>,
    pub y: Vec<Option<FaceGradient>>,
}

#[inline]
fn x_face(g: &Grid2, u: &[f64], i: usize, j: usize) -> FaceGradient {
    let at = |i: usize, j: usize| u[g.idx(i, j)];
    let normal = (at(i + 1, j) - at(i, j)) / g.hx;
    let t0 = (at(i, j + 1) - at(i, j - 1)) / (2.0 * g.hy);
    let t1 = (at(i + 1, j + 1) - at(i + 1, j - 1)) / (2.0 * g.hy);
    let tang = 0.5 * (t0 + t1);
    FaceGradient {
        normal,
        s: normal * normal + tang * tang,
    }
}

#[inline]
fn y_face(g: &Grid2, u: &[f64], i: usize, j: usize) -> FaceGradient {
    let at = |i: usize, j: usize| u[g.idx(i, j)];
    let normal = (at(i, j + 1) - at(i, j)) / g.hy;
    let t0 = (at(i + 1, j) - at(i - 1, j)) / (2.0 * g.hx);
    let t1 = (at(i + 1, j + 1) - at(i - 1, j + 1)) / (2.0 * g.hx);
    let tang = 0.5 * (t0 + t1);
    FaceGradient {
        normal,
        s: normal * normal + tang * tang,
    }
}

/// Face gradients of the node values `u` (full-grid layout).
pub fn face_gradients(mask: &DomainMask, u: &[f64]) -> FaceGradients {
    let g = *mask.grid();
    let kinds = mask.kinds();
    let interior = |i: usize, j: usize| kinds[g.idx(i, j)] == NodeKind::Interior;
    let mut x = vec![None; g.len()];
    let mut y = vec![None; g.len()];
    for j in 0..g.ny {
        for i in 0..g.nx {
            if i + 1 < g.nx && (interior(i, j) || interior(i + 1, j)) {
                x[g.idx(i, j)] = Some(x_face(&g, u, i, j));
            }
            if j + 1 < g.ny && (interior(i, j) || interior(i, j + 1)) {
                y[g.idx(i, j)] = Some(y_face(&g, u, i, j));
            }
        }
    }
    FaceGradients { x, y }
}

/// Largest squared face-gradient norm.
pub fn max_face_s(faces: &FaceGradients) -> f64 {
    faces
        .x
        .iter()
        .chain(&faces.y)
        .flatten()
        .map(|f| f.s)
        .fold(0.0, f64::max)
}

/// Conservative divergence of `coef(s) * Du` at every interior node; `None`
/// elsewhere. `coef` may fail (e.g. outside the spacelike region), in which case
/// the first failure is returned.
pub fn divergence<E>(
    mask: &DomainMask,
    u: &[f64],
    coef: impl Fn(f64) -> Result<f64, E>,
) -> Result<Vec<Option<f64>>, E> {
    let g = *mask.grid();
    let faces = face_gradients(mask, u);
    let flux = |f: &Option<FaceGradient>| -> Result<f64, E> {
        let f = f.expect("face adjacent to interior node");
        Ok(coef(f.s)? * f.normal)
    };
    let mut out = vec![None; g.len()];
    for (i, j) in mask.interior_nodes() {
        let fe = flux(&faces.x[g.idx(i, j)])?;
        let fw = flux(&faces.x[g.idx(i - 1, j)])?;
        let gn = flux(&faces.y[g.idx(i, j)])?;
        let gs = flux(&faces.y[g.idx(i, j - 1)])?;
        out[g.idx(i, j)] = Some((fe - fw) / g.hx + (gn - gs) / g.hy);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn laplacian_of_quadratic() {
        let m = DomainMask::rectangle(Grid2::square(-1.0, 1.0, 11).unwrap());
        let g = *m.grid();
        let u: Vec<f64> = (0..g.len())
            .map(|k| {
                let (i, j) = g.ij(k);
                let (x, y) = g.point(i, j);
                x * x + 3.0 * y * y
            })
            .collect();
        let d = divergence(&m, &u, |_| Ok::<_, Infallible>(1.0)).unwrap();
        for v in d.into_iter().flatten() {
            assert!((v - 8.0).abs() < 1e-10);
        }
    }
}
