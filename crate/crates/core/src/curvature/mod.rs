//! Euclidean and Lorentzian curvatures of the graph `z = u(x, y)`.
//!
//! Sign conventions: `H_R = 1/2 div(Du / sqrt(1 + |Du|^2))` (upward normal) and
//! `H_L = 1/2 div(Du / sqrt(1 - |Du|^2))`. Gaussian curvatures are
//! `K_R = det D^2u / (1 + |Du|^2)^2` and `K_L = -det D^2u / (1 - |Du|^2)^2`.

mod critical;

pub use critical::{
    accumulation_depth, find_critical_points, AccumulationDepth, CriticalKind, CriticalOptions,
    CriticalPoint, CriticalSet, DepthReport,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Jet2, ScalarField};
use crate::stencil;

pub fn mean_curvature_r(j: &Jet2) -> f64 {
    let [p, q] = j.du;
    let [uxx, uxy, uyy] = j.d2u;
    let w2 = 1.0 + p * p + q * q;
    ((1.0 + q * q) * uxx - 2.0 * p * q * uxy + (1.0 + p * p) * uyy) / (2.0 * w2 * w2.sqrt())
}

pub fn mean_curvature_l(j: &Jet2) -> Result<f64> {
    let [p, q] = j.du;
    let [uxx, uxy, uyy] = j.d2u;
    let w2 = 1.0 - p * p - q * q;
    if !(w2 > 0.0) {
        return Err(Error::NonSpacelike {
            max_grad: j.grad_norm(),
        });
    }
    Ok(((1.0 - q * q) * uxx + 2.0 * p * q * uxy + (1.0 - p * p) * uyy) / (2.0 * w2 * w2.sqrt()))
}

pub fn gauss_curvature_r(j: &Jet2) -> f64 {
    let w2 = 1.0 + j.grad_norm_sq();
    j.hess_det() / (w2 * w2)
}

pub fn gauss_curvature_l(j: &Jet2) -> Result<f64> {
    let w2 = 1.0 - j.grad_norm_sq();
    if !(w2 > 0.0) {
        return Err(Error::NonSpacelike {
            max_grad: j.grad_norm(),
        });
    }
    Ok(-j.hess_det() / (w2 * w2))
}

/// `(K_R, K_L)`.
pub fn gauss_curvatures(j: &Jet2) -> Result<(f64, f64)> {
    Ok((gauss_curvature_r(j), gauss_curvature_l(j)?))
}

/// Curvatures at one node. Lorentzian quantities are `None` when
/// `|Du| >= 1 - delta_space`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvaturePoint {
    pub h_r: f64,
    pub h_l: Option<f64>,
    pub k_r: f64,
    pub k_l: Option<f64>,
    pub grad_norm: f64,
}

impl CurvaturePoint {
    pub fn from_jet(j: &Jet2, delta_space: f64) -> Self {
        let grad_norm = j.grad_norm();
        let lorentz_ok = grad_norm < 1.0 - delta_space;
        CurvaturePoint {
            h_r: mean_curvature_r(j),
            h_l: if lorentz_ok {
                mean_curvature_l(j).ok()
            } else {
                None
            },
            k_r: gauss_curvature_r(j),
            k_l: if lorentz_ok {
                gauss_curvature_l(j).ok()
            } else {
                None
            },
            grad_norm,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureSummary {
    /// `inf |H_R|` over interior nodes.
    pub inf_abs_h_r: Option<f64>,
    /// `inf |H_L|` over interior nodes where `H_L` is defined.
    pub inf_abs_h_l: Option<f64>,
    pub max_grad_norm: Option<f64>,
    pub spacelike: bool,
    pub interior_nodes: usize,
}

/// Per-node curvatures of a field (interior nodes only).
#[derive(Debug, Clone)]
pub struct CurvatureField {
    pub points: Vec<Option<CurvaturePoint>>,
    pub summary: CurvatureSummary,
}

pub fn curvature_field(field: &ScalarField, delta_space: f64) -> CurvatureField {
    let g = *field.grid();
    let mask = field.mask();
    let points: Vec<Option<CurvaturePoint>> = (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = g.ij(k);
            mask.is_interior(i, j)
                .then(|| CurvaturePoint::from_jet(&field.jet_unchecked(i, j), delta_space))
        })
        .collect();
    let min_abs = |it: &mut dyn Iterator<Item = f64>| it.map(f64::abs).reduce(f64::min);
    let inf_abs_h_r = min_abs(&mut points.iter().flatten().map(|p| p.h_r));
    let inf_abs_h_l = min_abs(&mut points.iter().flatten().filter_map(|p| p.h_l));
    let max_grad_norm = points
        .iter()
        .flatten()
        .map(|p| p.grad_norm)
        .reduce(f64::max);
    let interior_nodes = points.iter().flatten().count();
    let spacelike = max_grad_norm.map_or(true, |m| m < 1.0 - delta_space);
    CurvatureField {
        points,
        summary: CurvatureSummary {
            inf_abs_h_r,
            inf_abs_h_l,
            max_grad_norm,
            spacelike,
            interior_nodes,
        },
    }
}

/// Which ambient metric a divergence-form mean curvature refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    Euclidean,
    Lorentzian,
}

/// Mean curvature evaluated directly in divergence form,
/// `1/2 div_h(Du / sqrt(1 +- |Du|^2))`, with face-centred fluxes. This is an
/// independent route to the closed-form jet expressions.
pub fn divergence_mean_curvature(
    field: &ScalarField,
    ambient: Ambient,
) -> Result<Vec<Option<f64>>> {
    let sign = match ambient {
        Ambient::Euclidean => 1.0,
        Ambient::Lorentzian => -1.0,
    };
    let div = stencil::divergence(field.mask(), field.values(), |s| {
        let w2 = 1.0 + sign * s;
        if w2 > 0.0 {
            Ok(1.0 / w2.sqrt())
        } else {
            Err(Error::NonSpacelike { max_grad: s.sqrt() })
        }
    })?;
    Ok(div.into_iter().map(|v| v.map(|d| 0.5 * d)).collect())
}
