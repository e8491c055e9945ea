//! Dirichlet solver for `div(phi(|Du|^2) Du) = 0` with
//! `phi(s) = (1 - s)^(-1/2) - (1 + s)^(-1/2)`.
//!
//! The coefficient vanishes like `s` at critical points, so the operator
//! degenerates there. The solver runs a damped Picard iteration with the
//! coefficient lagged one step and regularized by `+eps`, walking `eps` down a
//! schedule. Intermediate stages converge the regularized equation; the last stage
//! keeps `eps` only in the linear operator and drives the unregularized residual
//! to tolerance, so the fixed point is the true discrete equation.

mod linear;
mod probe;

pub use probe::{uniqueness_probe, ProbeConfig, ProbeReport, StartOutcome};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, DEFAULT_DELTA_SPACE};
use crate::grid::{DomainMask, NodeKind};
use crate::stencil::{self, FaceGradients};
use linear::{pcg, FivePoint, Numbering};

/// `phi(s) = (1 - s)^(-1/2) - (1 + s)^(-1/2)` for `0 <= s < 1`, evaluated without
/// cancellation as `2s / (sqrt(1 - s^2) (sqrt(1 + s) + sqrt(1 - s)))`.
pub fn phi(s: f64) -> f64 {
    let (a, b) = ((1.0 + s).sqrt(), (1.0 - s).sqrt());
    2.0 * s / (a * b * (a + b))
}

/// Regularized coefficient `phi(min(s, grad_cap^2)) + eps`.
pub fn flux_coefficient(s: f64, eps: f64, grad_cap: f64) -> f64 {
    phi(s.clamp(0.0, grad_cap * grad_cap)) + eps
}

/// Max-norm over interior nodes of the conservative discrete divergence of
/// `phi(|Du|^2) Du`.
pub fn residual(field: &ScalarField) -> Result<f64> {
    let div = stencil::divergence(field.mask(), field.values(), |s| {
        if s < 1.0 {
            Ok(phi(s))
        } else {
            Err(Error::NonSpacelike { max_grad: s.sqrt() })
        }
    })?;
    Ok(div.into_iter().flatten().fold(0.0, |m, v| m.max(v.abs())))
}

/// Per-node discrete divergence (interior nodes only).
pub fn residual_field(field: &ScalarField) -> Result<Vec<Option<f64>>> {
    stencil::divergence(field.mask(), field.values(), |s| {
        if s < 1.0 {
            Ok(phi(s))
        } else {
            Err(Error::NonSpacelike { max_grad: s.sqrt() })
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub tol_residual: f64,
    pub max_outer: usize,
    pub eps_schedule: Vec<f64>,
    pub damping: f64,
    pub grad_cap: f64,
    /// Relative tolerance of each linear solve.
    pub linear_tol: f64,
    pub max_linear_iterations: usize,
    /// Cap on Picard steps spent in each intermediate regularization stage.
    pub stage_max_iterations: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol_residual: 1e-8,
            max_outer: 600,
            eps_schedule: vec![1e-1, 1e-2, 1e-3, 1e-4],
            damping: 0.4,
            grad_cap: 1.0 - 1e-4,
            linear_tol: 1e-4,
            max_linear_iterations: 5000,
            stage_max_iterations: 25,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::domain(format!("invalid solve config: {m}")));
        if !(self.tol_residual > 0.0) {
            return bad("tol_residual must be positive");
        }
        if self.eps_schedule.is_empty() {
            return bad("eps_schedule is empty");
        }
        if self.eps_schedule.iter().any(|&e| !(e > 0.0)) {
            return bad("eps values must be positive");
        }
        if self.eps_schedule.windows(2).any(|w| !(w[1] < w[0])) {
            return bad("eps_schedule must be strictly decreasing");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad("damping must lie in (0, 1]");
        }
        if !(self.grad_cap > 0.0 && self.grad_cap < 1.0) {
            return bad("grad_cap must lie in (0, 1)");
        }
        if !(self.linear_tol > 0.0 && self.linear_tol < 1.0) {
            return bad("linear_tol must lie in (0, 1)");
        }
        if self.max_outer == 0 {
            return bad("max_outer must be positive");
        }
        Ok(())
    }

    pub fn eps_final(&self) -> f64 {
        *self.eps_schedule.last().expect("validated schedule")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub eps: f64,
    pub iterations: usize,
    /// Unregularized residual of the best iterate seen when the stage ended.
    pub best_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub outer_iterations: usize,
    pub final_residual: f64,
    pub max_grad_norm: f64,
    pub eps_path: Vec<StageRecord>,
    /// Unregularized residual at the start of every outer iteration
    /// (`inf` while some face gradient exceeds the cap).
    pub residual_history: Vec<f64>,
    pub damping_halvings: usize,
    pub linear_iterations: usize,
    /// Linear solves that hit the iteration cap before their tolerance.
    pub linear_failures: usize,
    #[serde(skip)]
    pub wall_time_s: f64,
}

/// Dirichlet data: values at the boundary nodes of a mask.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues {
    mask: DomainMask,
    values: Vec<f64>,
}

impl BoundaryValues {
    pub fn from_fn(mask: &DomainMask, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let g = *mask.grid();
        let mut values = vec![0.0; g.len()];
        for (i, j) in mask.boundary_nodes() {
            let (x, y) = g.point(i, j);
            let v = f(x, y);
            if !v.is_finite() {
                return Err(Error::domain(format!(
                    "boundary value at ({x}, {y}) is not finite"
                )));
            }
            values[g.idx(i, j)] = v;
        }
        Ok(BoundaryValues {
            mask: mask.clone(),
            values,
        })
    }

    /// Boundary values taken from a field (interior values ignored).
    pub fn from_field(field: &ScalarField) -> Self {
        let mut values = field.values().to_vec();
        for (v, k) in values.iter_mut().zip(field.mask().kinds()) {
            if *k != NodeKind::Boundary {
                *v = 0.0;
            }
        }
        BoundaryValues {
            mask: field.mask().clone(),
            values,
        }
    }

    pub fn mask(&self) -> &DomainMask {
        &self.mask
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn range(&self) -> (f64, f64) {
        self.mask
            .boundary_nodes()
            .map(|(i, j)| self.values[self.mask.grid().idx(i, j)])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Negated data on the same mask.
    pub fn negated(&self) -> Self {
        BoundaryValues {
            mask: self.mask.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Checks that no two 4-adjacent boundary nodes differ by a slope `>= cap`; a
    /// spacelike graph is 1-Lipschitz, so such data has no spacelike extension.
    fn check_spacelike_compatible(&self, cap: f64) -> Result<()> {
        let g = *self.mask.grid();
        let kinds = self.mask.kinds();
        for (i, j) in self.mask.boundary_nodes() {
            let v = self.values[g.idx(i, j)];
            for (ni, nj, h) in [(i + 1, j, g.hx), (i, j + 1, g.hy)] {
                if ni >= g.nx || nj >= g.ny || kinds[g.idx(ni, nj)] != NodeKind::Boundary {
                    continue;
                }
                let slope = (self.values[g.idx(ni, nj)] - v).abs() / h;
                if slope >= cap {
                    let (x, y) = g.point(i, j);
                    return Err(Error::domain(format!(
                        "boundary data has slope {slope:.4} >= {cap} near ({x:.4}, {y:.4}); no spacelike solution matches it"
                    )));
                }
            }
        }
        Ok(())
    }
}

struct Workspace<'a> {
    mask: &'a DomainMask,
    num: Numbering,
    cfg: &'a SolveConfig,
    linear_iterations: usize,
    linear_failures: usize,
}

impl Workspace<'_> {
    fn coefficients(
        &self,
        faces: &FaceGradients,
        coef: impl Fn(f64) -> f64,
    ) -> (Vec<f64>, Vec<f64>) {
        let map = |v: &Vec<Option<stencil::FaceGradient>>| {
            v.iter().map(|f| f.map_or(0.0, |f| coef(f.s))).collect()
        };
        (map(&faces.x), map(&faces.y))
    }

    /// `div(c grad u)` at interior unknowns for face coefficients `(cx, cy)`.
    fn divergence(&self, u: &[f64], cx: &[f64], cy: &[f64]) -> Vec<f64> {
        let g = *self.mask.grid();
        self.num
            .node_of
            .iter()
            .map(|&k| {
                let (i, j) = g.ij(k);
                let c = u[k];
                let fe = cx[k] * (u[g.idx(i + 1, j)] - c) / g.hx;
                let fw = cx[g.idx(i - 1, j)] * (c - u[g.idx(i - 1, j)]) / g.hx;
                let gn = cy[k] * (u[g.idx(i, j + 1)] - c) / g.hy;
                let gs = cy[g.idx(i, j - 1)] * (c - u[g.idx(i, j - 1)]) / g.hy;
                (fe - fw) / g.hx + (gn - gs) / g.hy
            })
            .collect()
    }

    /// Solves `-div(c grad d) = rhs` with `d = 0` on the boundary.
    fn correction(&mut self, cx: &[f64], cy: &[f64], rhs: &[f64], rtol: f64) -> Vec<f64> {
        let a = FivePoint::assemble(self.mask, &self.num, cx, cy);
        let mut d = vec![0.0; self.num.len()];
        let out = pcg(
            &a,
            rhs,
            &mut d,
            rtol,
            1e-300,
            self.cfg.max_linear_iterations,
        );
        self.linear_iterations += out.iterations;
        if !out.converged {
            self.linear_failures += 1;
        }
        d
    }

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Unregularized residual, or `inf` if a face gradient reaches the cap.
    fn true_residual(&self, u: &[f64], faces: &FaceGradients) -> f64 {
        let cap2 = self.cfg.grad_cap * self.cfg.grad_cap;
        if stencil::max_face_s(faces) >= cap2 {
            return f64::INFINITY;
        }
        let (cx, cy) = self.coefficients(faces, phi);
        Self::max_abs(&self.divergence(u, &cx, &cy))
    }

    fn nodal_max_grad(&self, u: &[f64]) -> f64 {
        let g = *self.mask.grid();
        self.num
            .node_of
            .iter()
            .map(|&k| {
                let (i, j) = g.ij(k);
                let ux = (u[g.idx(i + 1, j)] - u[g.idx(i - 1, j)]) / (2.0 * g.hx);
                let uy = (u[g.idx(i, j + 1)] - u[g.idx(i, j - 1)]) / (2.0 * g.hy);
                ux.hypot(uy)
            })
            .fold(0.0, f64::max)
    }
}

/// Discrete harmonic extension of the boundary data.
pub fn harmonic_extension(g: &BoundaryValues) -> Result<ScalarField> {
    let mask = g.mask();
    let num = Numbering::new(mask);
    let mut u = g.values().to_vec();
    if num.len() > 0 {
        let (lo, hi) = g.range();
        let mid = 0.5 * (lo + hi);
        for &k in &num.node_of {
            u[k] = if lo == hi { lo } else { mid };
        }
        let ones = vec![1.0; mask.grid().len()];
        let cfg = SolveConfig::default();
        let mut ws = Workspace {
            mask,
            num,
            cfg: &cfg,
            linear_iterations: 0,
            linear_failures: 0,
        };
        let rhs = ws.divergence(&u, &ones, &ones);
        if Workspace::max_abs(&rhs) > 0.0 {
            let d = ws.correction(&ones, &ones, &rhs, 1e-14);
            for (p, &k) in ws.num.node_of.iter().enumerate() {
                u[k] += d[p];
            }
        }
    }
    ScalarField::new(mask.clone(), u)
}

pub fn solve_dirichlet(
    mask: &DomainMask,
    g: &BoundaryValues,
    cfg: &SolveConfig,
    init: Option<&ScalarField>,
) -> Result<(ScalarField, SolveReport)> {
    let start = Instant::now();
    cfg.validate()?;
    if g.mask() != mask {
        return Err(Error::domain(
            "boundary values were built on a different mask",
        ));
    }
    if mask.interior_count() == 0 {
        return Err(Error::domain("mask has no interior nodes"));
    }
    g.check_spacelike_compatible(cfg.grad_cap)?;

    let mut u: Vec<f64> = match init {
        Some(f) => {
            if f.mask() != mask {
                return Err(Error::domain("initial field does not match the mask"));
            }
            let mut v = f.values().to_vec();
            for (k, kind) in mask.kinds().iter().enumerate() {
                if *kind == NodeKind::Boundary {
                    v[k] = g.values()[k];
                }
            }
            v
        }
        None => harmonic_extension(g)?.into_values(),
    };

    let mut ws = Workspace {
        mask,
        num: Numbering::new(mask),
        cfg,
        linear_iterations: 0,
        linear_failures: 0,
    };
    let cap2 = cfg.grad_cap * cfg.grad_cap;
    let last_stage = cfg.eps_schedule.len() - 1;

    let mut history = Vec::new();
    let mut eps_path = Vec::new();
    let mut best = (f64::INFINITY, u.clone());
    let mut outer = 0;
    let mut converged = false;
    let mut halvings = 0;
    let mut scale: Option<f64> = None;

    'stages: for (stage, &eps) in cfg.eps_schedule.iter().enumerate() {
        let final_stage = stage == last_stage;
        let mut stage_iters = 0;
        loop {
            if outer == cfg.max_outer {
                eps_path.push(StageRecord {
                    eps,
                    iterations: stage_iters,
                    best_residual: best.0,
                });
                break 'stages;
            }
            outer += 1;
            let faces = stencil::face_gradients(mask, &u);
            let res = ws.true_residual(&u, &faces);
            history.push(res);
            if res < best.0 {
                best = (res, u.clone());
            }
            if res <= cfg.tol_residual && ws.nodal_max_grad(&u) <= cfg.grad_cap {
                converged = true;
                eps_path.push(StageRecord {
                    eps,
                    iterations: stage_iters,
                    best_residual: best.0,
                });
                break 'stages;
            }

            let (cx, cy) = ws.coefficients(&faces, |s| flux_coefficient(s, eps, cfg.grad_cap));
            let rhs = if final_stage {
                let (px, py) = ws.coefficients(&faces, |s| flux_coefficient(s, 0.0, cfg.grad_cap));
                ws.divergence(&u, &px, &py)
            } else {
                ws.divergence(&u, &cx, &cy)
            };
            let stage_res = Workspace::max_abs(&rhs);
            let scale = *scale.get_or_insert(stage_res.max(cfg.tol_residual));
            if !final_stage && (stage_res <= eps * scale || stage_iters == cfg.stage_max_iterations)
            {
                eps_path.push(StageRecord {
                    eps,
                    iterations: stage_iters,
                    best_residual: best.0,
                });
                continue 'stages;
            }

            let d = ws.correction(&cx, &cy, &rhs, cfg.linear_tol);
            let current_s = stencil::max_face_s(&faces);
            let mut theta = cfg.damping;
            let mut candidate = u.clone();
            for attempt in 0..=40 {
                for (p, &k) in ws.num.node_of.iter().enumerate() {
                    candidate[k] = u[k] + theta * d[p];
                }
                let s = stencil::max_face_s(&stencil::face_gradients(mask, &candidate));
                if s <= cap2 || s <= current_s || attempt == 40 {
                    break;
                }
                theta *= 0.5;
                halvings += 1;
            }
            u = candidate;
            stage_iters += 1;
        }
    }

    let out = if converged { u } else { best.1 };
    let field = ScalarField::new(mask.clone(), out)?;
    let faces = stencil::face_gradients(mask, field.values());
    let final_residual = ws.true_residual(field.values(), &faces);
    let report = SolveReport {
        converged,
        outer_iterations: outer,
        final_residual,
        max_grad_norm: field.max_grad_norm(),
        eps_path,
        residual_history: history,
        damping_halvings: halvings,
        linear_iterations: ws.linear_iterations,
        linear_failures: ws.linear_failures,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((field, report))
}

/// True if the field is spacelike with the default margin and its residual is
/// at most `tol`.
pub fn is_certified_solution(field: &ScalarField, tol: f64) -> bool {
    field.is_spacelike(DEFAULT_DELTA_SPACE) && residual(field).map_or(false, |r| r <= tol)
}
