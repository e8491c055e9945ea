//! Symmetric five-point systems `-div(c grad v) = rhs` on the interior nodes of a
//! mask, with homogeneous Dirichlet data, solved by MIC(0)-preconditioned CG.

use crate::grid::{DomainMask, NodeKind};

const NONE: usize = usize::MAX;

/// Interior-node numbering (row-major) and the inverse map.
#[derive(Debug, Clone)]
pub(crate) struct Numbering {
    pub node_of: Vec<usize>,
    pub unknown_of: Vec<usize>,
}

impl Numbering {
    pub fn new(mask: &DomainMask) -> Self {
        let mut unknown_of = vec![NONE; mask.grid().len()];
        let mut node_of = Vec::new();
        for (k, kind) in mask.kinds().iter().enumerate() {
            if *kind == NodeKind::Interior {
                unknown_of[k] = node_of.len();
                node_of.push(k);
            }
        }
        Numbering {
            node_of,
            unknown_of,
        }
    }

    pub fn len(&self) -> usize {
        self.node_of.len()
    }
}

/// Matrix with one diagonal entry and couplings to the east and north unknowns
/// (west/south follow by symmetry).
#[derive(Debug, Clone)]
pub(crate) struct FivePoint {
    diag: Vec<f64>,
    east: Vec<f64>,
    north: Vec<f64>,
    east_idx: Vec<usize>,
    north_idx: Vec<usize>,
    west_idx: Vec<usize>,
    south_idx: Vec<usize>,
}

impl FivePoint {
    /// `cx[idx(i,j)]` is the coefficient on face `(i,j)-(i+1,j)`, `cy` on
    /// `(i,j)-(i,j+1)`.
    pub fn assemble(mask: &DomainMask, num: &Numbering, cx: &[f64], cy: &[f64]) -> Self {
        let g = *mask.grid();
        let n = num.len();
        let (ihx2, ihy2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
        let mut a = FivePoint {
            diag: vec![0.0; n],
            east: vec![0.0; n],
            north: vec![0.0; n],
            east_idx: vec![NONE; n],
            north_idx: vec![NONE; n],
            west_idx: vec![NONE; n],
            south_idx: vec![NONE; n],
        };
        for (p, &k) in num.node_of.iter().enumerate() {
            let (i, j) = g.ij(k);
            let (ce, cw) = (cx[g.idx(i, j)], cx[g.idx(i - 1, j)]);
            let (cn, cs) = (cy[g.idx(i, j)], cy[g.idx(i, j - 1)]);
            a.diag[p] = (ce + cw) * ihx2 + (cn + cs) * ihy2;
            let e = num.unknown_of[g.idx(i + 1, j)];
            if e != NONE {
                a.east[p] = -ce * ihx2;
                a.east_idx[p] = e;
                a.west_idx[e] = p;
            }
            let nn = num.unknown_of[g.idx(i, j + 1)];
            if nn != NONE {
                a.north[p] = -cn * ihy2;
                a.north_idx[p] = nn;
                a.south_idx[nn] = p;
            }
        }
        a
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for p in 0..self.len() {
            let mut v = self.diag[p] * x[p];
            if self.east_idx[p] != NONE {
                v += self.east[p] * x[self.east_idx[p]];
            }
            if self.north_idx[p] != NONE {
                v += self.north[p] * x[self.north_idx[p]];
            }
            let w = self.west_idx[p];
            if w != NONE {
                v += self.east[w] * x[w];
            }
            let s = self.south_idx[p];
            if s != NONE {
                v += self.north[s] * x[s];
            }
            y[p] = v;
        }
    }
}

/// Modified incomplete Cholesky, MIC(0), in the `L D^-1 L^T` form with
/// `precon = 1/sqrt(e)`.
pub(crate) struct Mic0 {
    precon: Vec<f64>,
}

impl Mic0 {
    const TAU: f64 = 0.97;
    const SIGMA: f64 = 0.25;

    pub fn new(a: &FivePoint) -> Self {
        let n = a.len();
        let mut precon = vec![0.0; n];
        for p in 0..n {
            let mut e = a.diag[p];
            let w = a.west_idx[p];
            if w != NONE {
                let t = a.east[w] * precon[w];
                e -= t * t + Self::TAU * a.east[w] * a.north[w] * precon[w] * precon[w];
            }
            let s = a.south_idx[p];
            if s != NONE {
                let t = a.north[s] * precon[s];
                e -= t * t + Self::TAU * a.north[s] * a.east[s] * precon[s] * precon[s];
            }
            if e < Self::SIGMA * a.diag[p] {
                e = a.diag[p];
            }
            precon[p] = 1.0 / e.sqrt();
        }
        Mic0 { precon }
    }

    pub fn apply(&self, a: &FivePoint, r: &[f64], z: &mut [f64]) {
        let n = a.len();
        let mut q = vec![0.0; n];
        for p in 0..n {
            let mut t = r[p];
            let w = a.west_idx[p];
            if w != NONE {
                t -= a.east[w] * self.precon[w] * q[w];
            }
            let s = a.south_idx[p];
            if s != NONE {
                t -= a.north[s] * self.precon[s] * q[s];
            }
            q[p] = t * self.precon[p];
        }
        for p in (0..n).rev() {
            let mut t = q[p];
            let e = a.east_idx[p];
            if e != NONE {
                t -= a.east[p] * self.precon[p] * z[e];
            }
            let nn = a.north_idx[p];
            if nn != NONE {
                t -= a.north[p] * self.precon[p] * z[nn];
            }
            z[p] = t * self.precon[p];
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct CgOutcome {
    pub iterations: usize,
    #[allow(dead_code)]
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Solves `A x = b` starting from `x`; stops when `max|r| <= max(rtol*max|b|, atol)`.
pub(crate) fn pcg(
    a: &FivePoint,
    b: &[f64],
    x: &mut [f64],
    rtol: f64,
    atol: f64,
    max_iter: usize,
) -> CgOutcome {
    let n = a.len();
    let pre = Mic0::new(a);
    let mut r = vec![0.0; n];
    a.apply(x, &mut r);
    for p in 0..n {
        r[p] = b[p] - r[p];
    }
    let target = (rtol * max_abs(b)).max(atol);
    let mut res = max_abs(&r);
    if res <= target {
        return CgOutcome {
            iterations: 0,
            residual: res,
            converged: true,
        };
    }
    let mut z = vec![0.0; n];
    pre.apply(a, &r, &mut z);
    let mut d = z.clone();
    let mut rz = dot(&r, &z);
    let mut ad = vec![0.0; n];
    for it in 1..=max_iter {
        a.apply(&d, &mut ad);
        let dad = dot(&d, &ad);
        if !(dad > 0.0) {
            return CgOutcome {
                iterations: it,
                residual: res,
                converged: false,
            };
        }
        let alpha = rz / dad;
        for p in 0..n {
            x[p] += alpha * d[p];
            r[p] -= alpha * ad[p];
        }
        res = max_abs(&r);
        if res <= target {
            return CgOutcome {
                iterations: it,
                residual: res,
                converged: true,
            };
        }
        pre.apply(a, &r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for p in 0..n {
            d[p] = z[p] + beta * d[p];
        }
    }
    CgOutcome {
        iterations: max_iter,
        residual: res,
        converged: false,
    }
}
