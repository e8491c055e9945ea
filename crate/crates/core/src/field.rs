//! Sampled scalar fields and their second-order jets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DomainMask, Grid2, NodeKind};

/// Spacelike margin: a field is spacelike when `max |Du| < 1 - DEFAULT_DELTA_SPACE`.
pub const DEFAULT_DELTA_SPACE: f64 = 1e-6;

/// Pointwise second-order data `(u, Du, D^2 u)`. The Hessian is stored as
/// `[u_xx, u_xy, u_yy]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub u: f64,
    pub du: [f64; 2],
    pub d2u: [f64; 3],
}

impl Jet2 {
    pub fn new(u: f64, du: [f64; 2], d2u: [f64; 3]) -> Self {
        Jet2 { u, du, d2u }
    }

    #[inline]
    pub fn grad_norm_sq(&self) -> f64 {
        self.du[0] * self.du[0] + self.du[1] * self.du[1]
    }

    #[inline]
    pub fn grad_norm(&self) -> f64 {
        self.du[0].hypot(self.du[1])
    }

    #[inline]
    pub fn hess_det(&self) -> f64 {
        self.d2u[0] * self.d2u[2] - self.d2u[1] * self.d2u[1]
    }

    #[inline]
    pub fn hess_trace(&self) -> f64 {
        self.d2u[0] + self.d2u[2]
    }

    /// Frobenius norm of the Hessian.
    pub fn hess_norm(&self) -> f64 {
        let [a, b, c] = self.d2u;
        (a * a + 2.0 * b * b + c * c).sqrt()
    }

    /// Largest absolute Hessian entry.
    pub fn hess_max_abs(&self) -> f64 {
        self.d2u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Second-order Taylor transport of the jet by `(dx, dy)` (Hessian held fixed).
    pub fn shifted(&self, dx: f64, dy: f64) -> Jet2 {
        let [a, b, c] = self.d2u;
        let ux = self.du[0] + a * dx + b * dy;
        let uy = self.du[1] + b * dx + c * dy;
        let u = self.u
            + self.du[0] * dx
            + self.du[1] * dy
            + 0.5 * (a * dx * dx + 2.0 * b * dx * dy + c * dy * dy);
        Jet2 {
            u,
            du: [ux, uy],
            d2u: self.d2u,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.du.iter().chain(&self.d2u).all(|v| v.is_finite())
    }
}

/// A function sampled at every non-exterior node of a masked grid.
///
/// Exterior entries of [`values`](Self::values) hold `0.0` and carry no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    mask: DomainMask,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mask: DomainMask, mut values: Vec<f64>) -> Result<Self> {
        let g = *mask.grid();
        if values.len() != g.len() {
            return Err(Error::domain(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                g.len()
            )));
        }
        for (k, v) in values.iter_mut().enumerate() {
            if mask.kinds()[k] == NodeKind::Exterior {
                *v = 0.0;
            } else if !v.is_finite() {
                let (i, j) = g.ij(k);
                return Err(Error::domain(format!(
                    "non-finite value at node ({i}, {j})"
                )));
            }
        }
        Ok(ScalarField { mask, values })
    }

    /// Samples `f` at every non-exterior node.
    pub fn from_fn(mask: DomainMask, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let g = *mask.grid();
        let values = (0..g.len())
            .map(|k| {
                if mask.kinds()[k] == NodeKind::Exterior {
                    0.0
                } else {
                    let (i, j) = g.ij(k);
                    f(g.x(i), g.y(j))
                }
            })
            .collect();
        ScalarField::new(mask, values)
    }

    pub fn mask(&self) -> &DomainMask {
        &self.mask
    }

    pub fn grid(&self) -> &Grid2 {
        self.mask.grid()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid().idx(i, j)]
    }

    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        self.mask.is_active(i, j).then(|| self.at(i, j))
    }

    /// Same mask, transformed values.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        ScalarField::new(self.mask.clone(), values)
    }

    /// Centered second-order jet at an interior node.
    pub fn jet_at(&self, i: usize, j: usize) -> Result<Jet2> {
        let g = self.grid();
        if i >= g.nx || j >= g.ny || !self.mask.is_interior(i, j) {
            return Err(Error::domain(format!(
                "jet requested at non-interior node ({i}, {j})"
            )));
        }
        Ok(self.jet_unchecked(i, j))
    }

    /// Jet at an interior node without the interiority check.
    #[inline]
    pub(crate) fn jet_unchecked(&self, i: usize, j: usize) -> Jet2 {
        let g = self.grid();
        let (hx, hy) = (g.hx, g.hy);
        let v =
            |di: isize, dj: isize| self.at((i as isize + di) as usize, (j as isize + dj) as usize);
        let c = v(0, 0);
        let (e, w, n, s) = (v(1, 0), v(-1, 0), v(0, 1), v(0, -1));
        let ux = (e - w) / (2.0 * hx);
        let uy = (n - s) / (2.0 * hy);
        let uxx = (e - 2.0 * c + w) / (hx * hx);
        let uyy = (n - 2.0 * c + s) / (hy * hy);
        let uxy = (v(1, 1) - v(1, -1) - v(-1, 1) + v(-1, -1)) / (4.0 * hx * hy);
        Jet2 {
            u: c,
            du: [ux, uy],
            d2u: [uxx, uxy, uyy],
        }
    }

    /// Jets at every node; `None` off the interior.
    pub fn jets(&self) -> Vec<Option<Jet2>> {
        let g = *self.grid();
        (0..g.len())
            .map(|k| {
                let (i, j) = g.ij(k);
                self.mask
                    .is_interior(i, j)
                    .then(|| self.jet_unchecked(i, j))
            })
            .collect()
    }

    /// `max |Du|` over interior nodes (0 for an empty interior).
    pub fn max_grad_norm(&self) -> f64 {
        self.mask
            .interior_nodes()
            .map(|(i, j)| self.jet_unchecked(i, j).grad_norm())
            .fold(0.0, f64::max)
    }

    pub fn is_spacelike(&self, delta_space: f64) -> bool {
        self.max_grad_norm() < 1.0 - delta_space
    }

    /// Minimum and maximum over non-exterior nodes.
    pub fn range(&self) -> (f64, f64) {
        self.active_values()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn active_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(self.mask.kinds())
            .filter(|(_, &k)| k != NodeKind::Exterior)
            .map(|(&v, _)| v)
    }

    /// `max |u - v|` over non-exterior nodes of two fields on the same mask.
    pub fn sup_distance(&self, other: &ScalarField) -> Result<f64> {
        if self.mask != other.mask {
            return Err(Error::domain("fields live on different masks"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.mask.kinds())
            .filter(|(_, &k)| k != NodeKind::Exterior)
            .map(|((a, b), _)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n: usize) -> DomainMask {
        DomainMask::rectangle(Grid2::square(-1.0, 1.0, n).unwrap())
    }

    #[test]
    fn affine_jet_is_exact() {
        let f = ScalarField::from_fn(square(9), |x, y| 0.3 * x + 0.4 * y).unwrap();
        for (i, j) in f.mask().interior_nodes() {
            let jet = f.jet_at(i, j).unwrap();
            assert!((jet.du[0] - 0.3).abs() < 1e-14);
            assert!((jet.du[1] - 0.4).abs() < 1e-14);
            assert!(jet.d2u.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn saddle_jet_at_origin() {
        let f = ScalarField::from_fn(square(9), |x, y| x * x - y * y).unwrap();
        let jet = f.jet_at(4, 4).unwrap();
        assert_eq!(jet.du, [0.0, 0.0]);
        assert!((jet.d2u[0] - 2.0).abs() < 1e-12);
        assert!(jet.d2u[1].abs() < 1e-12);
        assert!((jet.d2u[2] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn jet_off_interior_is_an_error() {
        let f = ScalarField::from_fn(square(5), |x, _| x).unwrap();
        assert!(f.jet_at(0, 2).is_err());
        assert!(f.jet_at(9, 9).is_err());
    }

    #[test]
    fn non_finite_values_rejected() {
        let m = square(5);
        let mut v = vec![0.0; 25];
        v[12] = f64::NAN;
        assert!(ScalarField::new(m, v).is_err());
    }

    #[test]
    fn shifted_jet_matches_quadratic() {
        let u = |x: f64, y: f64| 1.0 + 0.5 * x - 0.25 * y + x * x + 0.5 * x * y - 0.75 * y * y;
        let f = ScalarField::from_fn(square(9), u).unwrap();
        let jet = f.jet_at(4, 4).unwrap().shifted(0.1, -0.2);
        assert!((jet.u - u(0.1, -0.2)).abs() < 1e-12);
        assert!((jet.du[0] - (0.5 + 0.2 - 0.1)).abs() < 1e-12);
    }
}
