//! Inradius of a mask from an exact Euclidean distance transform.

use crate::error::{Error, Result};
use crate::grid::{DomainMask, Grid2, NodeKind};

/// Lower envelope of parabolas `(p - q h)^2 + f(q)` over finite `f(q)`
/// (Felzenszwalb-Huttenlocher), evaluated at `p = k h`.
fn edt_1d(f: &[f64], h: f64, out: &mut [f64]) {
    let n = f.len();
    let sites: Vec<usize> = (0..n).filter(|&q| f[q].is_finite()).collect();
    if sites.is_empty() {
        out.iter_mut().for_each(|v| *v = f64::INFINITY);
        return;
    }
    let pos = |q: usize| q as f64 * h;
    let meet = |a: usize, b: usize| {
        ((f[b] + pos(b) * pos(b)) - (f[a] + pos(a) * pos(a))) / (2.0 * (pos(b) - pos(a)))
    };
    let mut v: Vec<usize> = Vec::with_capacity(sites.len());
    let mut z: Vec<f64> = Vec::with_capacity(sites.len() + 1);
    for &q in &sites {
        while let Some(&last) = v.last() {
            if meet(last, q) <= *z.last().unwrap() {
                v.pop();
                z.pop();
            } else {
                break;
            }
        }
        if v.is_empty() {
            z.push(f64::NEG_INFINITY);
        } else {
            z.push(meet(*v.last().unwrap(), q));
        }
        v.push(q);
    }
    let mut k = 0;
    for (i, o) in out.iter_mut().enumerate() {
        let p = pos(i);
        while k + 1 < v.len() && z[k + 1] < p {
            k += 1;
        }
        let d = p - pos(v[k]);
        *o = d * d + f[v[k]];
    }
}

/// Distance from every node to the nearest non-interior node of the mask
/// (boundary or exterior).
pub fn distance_transform(mask: &DomainMask) -> Vec<f64> {
    let inside: Vec<bool> = mask
        .kinds()
        .iter()
        .map(|&k| k == NodeKind::Interior)
        .collect();
    set_distance(mask.grid(), &inside)
}

/// Distance from every node to the nearest node with `inside[k] == false`.
///
/// On grids with `hx == hy` squared distances are exact integers in index
/// units, so nodes at equal geometric distance get bit-identical values.
pub fn set_distance(g: &Grid2, inside: &[bool]) -> Vec<f64> {
    let g = *g;
    let (sx, sy, scale) = if g.hx == g.hy {
        (1.0, 1.0, g.hx)
    } else {
        (g.hx, g.hy, 1.0)
    };
    let mut rows = vec![0.0; g.len()];
    let mut f = vec![0.0; g.nx];
    let mut out = vec![0.0; g.nx];
    for j in 0..g.ny {
        for i in 0..g.nx {
            f[i] = if inside[g.idx(i, j)] {
                f64::INFINITY
            } else {
                0.0
            };
        }
        edt_1d(&f, sx, &mut out);
        for i in 0..g.nx {
            rows[g.idx(i, j)] = out[i];
        }
    }
    let mut dist = vec![0.0; g.len()];
    let mut f = vec![0.0; g.ny];
    let mut out = vec![0.0; g.ny];
    for i in 0..g.nx {
        for j in 0..g.ny {
            f[j] = rows[g.idx(i, j)];
        }
        edt_1d(&f, sy, &mut out);
        for j in 0..g.ny {
            dist[g.idx(i, j)] = out[j].sqrt() * scale;
        }
    }
    dist
}

/// Largest distance from an interior node to the nearest non-interior node.
pub fn inradius(mask: &DomainMask) -> Result<f64> {
    if mask.interior_count() == 0 {
        return Err(Error::domain("inradius needs at least one interior node"));
    }
    let d = distance_transform(mask);
    Ok(mask
        .kinds()
        .iter()
        .zip(&d)
        .filter(|(k, _)| **k == NodeKind::Interior)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max))
}

/// Inradius of an arbitrary node set: the largest distance from a member to the
/// nearest non-member. `None` for an empty set.
pub fn inradius_of_set(g: &Grid2, inside: &[bool]) -> Option<f64> {
    if !inside.iter().any(|&b| b) {
        return None;
    }
    let d = set_distance(g, inside);
    Some(
        inside
            .iter()
            .zip(&d)
            .filter(|(b, _)| **b)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max),
    )
}

/// Quadratic-time reference for tests.
#[cfg(test)]
pub(crate) fn inradius_brute_force(mask: &DomainMask) -> f64 {
    let g = *mask.grid();
    let others: Vec<(f64, f64)> = (0..g.len())
        .filter(|&k| mask.kinds()[k] != NodeKind::Interior)
        .map(|k| {
            let (i, j) = g.ij(k);
            g.point(i, j)
        })
        .collect();
    mask.interior_nodes()
        .map(|(i, j)| {
            let (x, y) = g.point(i, j);
            others
                .iter()
                .map(|&(a, b)| (x - a).hypot(y - b))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_is_half_short_side() {
        let m = DomainMask::rectangle(Grid2::spanning(0.0, 4.0, 0.0, 2.0, 81, 41).unwrap());
        assert!((inradius(&m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disc_and_annulus() {
        let n = 65;
        let h = 2.0 / (n - 1) as f64;
        // boundary nodes sit up to sqrt(2) h inside a curved rim
        let d = DomainMask::disc(0.0, 0.0, 1.0, n).unwrap();
        assert!((inradius(&d).unwrap() - 1.0).abs() <= 1.5 * h);
        let a = DomainMask::annulus(0.0, 0.0, 1.0, 3.0, n).unwrap();
        assert!((inradius(&a).unwrap() - 1.0).abs() <= 6.0 / (n - 1) as f64);
    }

    #[test]
    fn matches_brute_force() {
        let anis = Grid2::spanning(-1.0, 1.0, -1.0, 2.0, 23, 31).unwrap();
        let masks = [
            DomainMask::disc(0.3, -0.2, 0.8, 21).unwrap(),
            DomainMask::annulus(0.0, 0.0, 0.4, 1.0, 27).unwrap(),
            DomainMask::slit_annulus(0.0, 0.0, 0.4, 1.0, 27).unwrap(),
            DomainMask::from_predicate(anis, |x, y| x * x + 0.5 * y * y < 0.9).unwrap(),
        ];
        for m in &masks {
            assert!((inradius(m).unwrap() - inradius_brute_force(m)).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_interior_is_an_error() {
        let m = DomainMask::rectangle(Grid2::square(0.0, 1.0, 3).unwrap());
        assert_eq!(m.interior_count(), 1);
        let tiny = DomainMask::disc(0.0, 0.0, 1.0, 3).unwrap();
        assert!(tiny.interior_count() == 0 && inradius(&tiny).is_err());
    }
}
