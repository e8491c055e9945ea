//! Numerical checks of the curvature inequalities on sampled and solved fields.
//!
//! Each check produces a [`TheoremReport`] stating an inequality `lhs <= rhs`
//! with a tolerance. Inequalities are asserted only when their hypotheses are
//! certified for the field at hand; otherwise the values are reported as
//! measurements.

mod inradius;
mod suite;

pub use inradius::{distance_transform, inradius, inradius_of_set, set_distance};
pub use suite::{
    run_suite, run_suite_file, run_suite_json, CaseKind, CaseReport, CaseSpec, NoiseSpec,
    SolveSummary, SuiteOptions, SuiteReport,
};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::curvature::{mean_curvature_r, CriticalSet};
use crate::field::{Jet2, ScalarField, DEFAULT_DELTA_SPACE};
use crate::levelset::{audit_inequality_1, default_audit_tau_grad, implicit_curvature};
use crate::INV_TWO_SQRT_TWO;

/// Calibrated constant `C` in the audit tolerance `10 tol_residual + C h^2`.
pub const EQ1_TOLERANCE_C: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckId {
    /// `H_R = 0` at critical points of solutions.
    T1,
    /// `|H_L| <= |k| / (2 sqrt 2)` on the regular set of solutions.
    Eq1,
    /// `inradius <= 1 / inf |H_R|` for any graph.
    Heinz,
    /// `inradius <= 1 / (2 sqrt 2 inf |H_R|)` for solutions.
    T3,
    /// `inradius <= 1 / inf |k|` when the critical set has finite depth.
    T4,
}

impl CheckId {
    pub const ALL: [CheckId; 5] = [
        CheckId::T1,
        CheckId::Eq1,
        CheckId::Heinz,
        CheckId::T3,
        CheckId::T4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::T1 => "t1",
            CheckId::Eq1 => "eq1",
            CheckId::Heinz => "heinz",
            CheckId::T3 => "t3",
            CheckId::T4 => "t4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The bound is infinite or there is nothing to check.
    Vacuous,
    /// Hypotheses not certified; values reported only.
    Measured,
}

/// How far a field is known to solve the `H_R = H_L` equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionStatus {
    /// Sampled from a closed-form or ODE solution.
    Exact,
    /// Solver output whose residual reached tolerance.
    Converged,
    Unverified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldContext {
    pub solution: SolutionStatus,
    pub solver_residual: Option<f64>,
    pub tol_residual: f64,
}

impl FieldContext {
    pub fn exact() -> Self {
        FieldContext {
            solution: SolutionStatus::Exact,
            solver_residual: None,
            tol_residual: 1e-8,
        }
    }

    pub fn unverified() -> Self {
        FieldContext {
            solution: SolutionStatus::Unverified,
            solver_residual: None,
            tol_residual: 1e-8,
        }
    }

    pub fn solved(converged: bool, residual: f64, tol_residual: f64) -> Self {
        FieldContext {
            solution: if converged {
                SolutionStatus::Converged
            } else {
                SolutionStatus::Unverified
            },
            solver_residual: Some(residual),
            tol_residual,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Hypothesis {
    pub certified: bool,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub solution: SolutionStatus,
    pub solver_residual: Option<f64>,
}

/// One inequality `lhs <= rhs`; `margin = rhs - lhs` and a pass needs
/// `margin >= -tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub check: CheckId,
    pub hypothesis: Hypothesis,
    pub lhs_label: String,
    pub lhs: Option<f64>,
    pub rhs_label: String,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub tolerance: f64,
    pub status: Status,
    pub note: Option<String>,
    pub details: serde_json::Value,
    pub provenance: Provenance,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Per-field quantities shared by the checks.
#[derive(Debug, Clone)]
pub struct FieldStats {
    pub jets: Vec<Option<Jet2>>,
    /// Interior nodes at least two hops from any non-interior node. Infima are
    /// taken over this set, and inradii are measured for the same set.
    pub deep: Vec<bool>,
    pub hess_max: f64,
    /// Max over deep nodes of centred differences of the Hessian entries.
    pub third_max: f64,
    pub h: f64,
    pub spacelike: bool,
}

impl FieldStats {
    pub fn new(field: &ScalarField) -> Self {
        let g = *field.grid();
        let jets = field.jets();
        let deep = field.mask().deep_interior(1);
        let hess_max = jets
            .iter()
            .flatten()
            .map(Jet2::hess_max_abs)
            .fold(0.0, f64::max);
        let mut third_max: f64 = 0.0;
        for k in (0..g.len()).filter(|&k| deep[k]) {
            let (i, j) = g.ij(k);
            let (e, w) = (
                jets[g.idx(i + 1, j)].unwrap(),
                jets[g.idx(i - 1, j)].unwrap(),
            );
            let (n, s) = (
                jets[g.idx(i, j + 1)].unwrap(),
                jets[g.idx(i, j - 1)].unwrap(),
            );
            for c in 0..3 {
                third_max = third_max
                    .max(((e.d2u[c] - w.d2u[c]) / (2.0 * g.hx)).abs())
                    .max(((n.d2u[c] - s.d2u[c]) / (2.0 * g.hy)).abs());
            }
        }
        FieldStats {
            jets,
            deep,
            hess_max,
            third_max,
            h: g.h_max(),
            spacelike: field.is_spacelike(DEFAULT_DELTA_SPACE),
        }
    }

    /// Level below which a curvature infimum is indistinguishable from zero.
    pub fn noise_floor(&self) -> f64 {
        self.h * self.h * (self.hess_max + self.third_max) + 1e-9
    }

    fn deep_jets(&self) -> impl Iterator<Item = &Jet2> + '_ {
        self.jets
            .iter()
            .zip(&self.deep)
            .filter(|(_, d)| **d)
            .filter_map(|(j, _)| j.as_ref())
    }
}

fn provenance(field: &ScalarField, ctx: &FieldContext) -> Provenance {
    let g = field.grid();
    Provenance {
        nx: g.nx,
        ny: g.ny,
        h: g.h_max(),
        solution: ctx.solution,
        solver_residual: ctx.solver_residual,
    }
}

fn solution_hypothesis(ctx: &FieldContext, stats: &FieldStats) -> Hypothesis {
    let mut reasons = Vec::new();
    match ctx.solution {
        SolutionStatus::Exact => reasons.push("reference solution".to_string()),
        SolutionStatus::Converged => reasons.push(format!(
            "solver residual {:.3e} <= {:.1e}",
            ctx.solver_residual.unwrap_or(f64::NAN),
            ctx.tol_residual
        )),
        SolutionStatus::Unverified => reasons.push("field is not a certified solution".to_string()),
    }
    if !stats.spacelike {
        reasons.push("field is not spacelike".to_string());
    }
    Hypothesis {
        certified: ctx.solution != SolutionStatus::Unverified && stats.spacelike,
        reasons,
    }
}

fn status_for(certified: bool, margin: f64, tolerance: f64) -> Status {
    if !certified {
        Status::Measured
    } else if margin >= -tolerance {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Bilinear interpolation of a nodal quantity at `(x, y)`; falls back to the
/// nearest node when the enclosing cell is not fully interior.
fn interpolate(field: &ScalarField, nodal: &[Option<f64>], x: f64, y: f64) -> Option<f64> {
    let g = field.grid();
    let fi = ((x - g.x0) / g.hx).floor();
    let fj = ((y - g.y0) / g.hy).floor();
    if fi >= 0.0 && fj >= 0.0 && (fi as usize) + 1 < g.nx && (fj as usize) + 1 < g.ny {
        let (i, j) = (fi as usize, fj as usize);
        let (s, t) = ((x - g.x(i)) / g.hx, (y - g.y(j)) / g.hy);
        let c = [
            nodal[g.idx(i, j)],
            nodal[g.idx(i + 1, j)],
            nodal[g.idx(i, j + 1)],
            nodal[g.idx(i + 1, j + 1)],
        ];
        if let [Some(a), Some(b), Some(c), Some(d)] = c {
            return Some(
                (1.0 - s) * (1.0 - t) * a + s * (1.0 - t) * b + (1.0 - s) * t * c + s * t * d,
            );
        }
    }
    let (i, j) = g.nearest(x, y);
    nodal[g.idx(i, j)]
}

/// `|H_R|` at every detected critical point, interpolated from nodal values.
/// The default tolerance is `5 h max|D^3 u| + 10 tol_residual`.
pub fn check_theorem1(
    field: &ScalarField,
    critical: &CriticalSet,
    ctx: &FieldContext,
    tol: Option<f64>,
) -> TheoremReport {
    let stats = FieldStats::new(field);
    let tolerance = tol.unwrap_or(5.0 * stats.h * stats.third_max + 10.0 * ctx.tol_residual);
    let hyp = solution_hypothesis(ctx, &stats);
    let nodal: Vec<Option<f64>> = stats
        .jets
        .iter()
        .map(|j| j.as_ref().map(mean_curvature_r))
        .collect();
    let g = field.grid();
    let mut worst: Option<f64> = None;
    let mut points = Vec::new();
    for p in &critical.points {
        let [x, y] = p.position;
        let interp = interpolate(field, &nodal, x, y).map(f64::abs);
        let (ni, nj) = g.nearest(x, y);
        let nearest = nodal[g.idx(ni, nj)].map(f64::abs);
        if let Some(v) = interp {
            worst = Some(worst.map_or(v, |w: f64| w.max(v)));
        }
        points.push(json!({
            "position": p.position,
            "kind": p.kind,
            "abs_h_r": interp,
            "abs_h_r_nearest_node": nearest,
        }));
    }
    let (status, margin, note) = match worst {
        None => (
            Status::Vacuous,
            None,
            Some("no critical points".to_string()),
        ),
        Some(w) => (status_for(hyp.certified, -w, tolerance), Some(-w), None),
    };
    TheoremReport {
        check: CheckId::T1,
        hypothesis: hyp,
        lhs_label: "max |H_R| at critical points".into(),
        lhs: worst,
        rhs_label: "0".into(),
        rhs: Some(0.0),
        margin,
        tolerance,
        status,
        note,
        details: json!({ "critical_points": points, "third_derivative_bound": stats.third_max }),
        provenance: provenance(field, ctx),
    }
}

/// Audit of `|H_L| - |k|/(2 sqrt 2) <= 0` with tolerance `10 tol_residual + c h^2`.
pub fn check_eq1(field: &ScalarField, ctx: &FieldContext, c: f64) -> TheoremReport {
    let stats = FieldStats::new(field);
    let tolerance = 10.0 * ctx.tol_residual + c * stats.h * stats.h;
    let hyp = solution_hypothesis(ctx, &stats);
    let mut report = TheoremReport {
        check: CheckId::Eq1,
        hypothesis: hyp,
        lhs_label: "max (|H_L| - |k|/(2 sqrt 2))".into(),
        lhs: None,
        rhs_label: "0".into(),
        rhs: Some(0.0),
        margin: None,
        tolerance,
        status: Status::Measured,
        note: None,
        details: serde_json::Value::Null,
        provenance: provenance(field, ctx),
    };
    match audit_inequality_1(field, default_audit_tau_grad(field), tolerance) {
        Ok(a) => {
            report.lhs = a.max_violation;
            report.margin = a.max_violation.map(|v| -v);
            report.status = match a.max_violation {
                None => Status::Vacuous,
                Some(v) => status_for(report.hypothesis.certified, -v, tolerance),
            };
            if a.audited == 0 {
                report.note = Some("no node with nonvanishing gradient".into());
            }
            report.details = json!({
                "audited": a.audited,
                "excluded": a.excluded,
                "exceed_count": a.exceed_count,
                "location": a.location,
                "tau_grad": a.tau_grad,
            });
        }
        Err(e) => report.note = Some(e.to_string()),
    }
    report
}

/// Heinz's bound and its sharpening for solutions, from one infimum.
pub fn check_heinz_and_theorem3(
    field: &ScalarField,
    ctx: &FieldContext,
) -> (TheoremReport, TheoremReport) {
    let stats = FieldStats::new(field);
    let floor = stats.noise_floor();
    let inf_hr = stats
        .deep_jets()
        .map(|j| mean_curvature_r(j).abs())
        .reduce(f64::min);
    let r_in = inradius_of_set(field.grid(), &stats.deep);
    let tolerance = stats.h;
    let vacuous = inf_hr.map_or(true, |v| v <= floor);
    let heinz_rhs = if vacuous {
        None
    } else {
        inf_hr.map(|v| 1.0 / v)
    };
    let t3_rhs = heinz_rhs.map(|r| INV_TWO_SQRT_TWO * r);
    let details = json!({
        "inf_abs_h_r": inf_hr,
        "noise_floor": floor,
        "inradius_mask": inradius(field.mask()).ok(),
    });
    let vacuous_note = "inf |H_R| is at the noise floor: the bound is infinite, consistent with graphs of unbounded inradius";

    let build = |check, hyp: Hypothesis, rhs: Option<f64>, rhs_label: &str| {
        let margin = match (r_in, rhs) {
            (Some(l), Some(r)) => Some(r - l),
            _ => None,
        };
        let status = match margin {
            _ if vacuous => Status::Vacuous,
            None => Status::Measured,
            Some(m) => status_for(hyp.certified, m, tolerance),
        };
        TheoremReport {
            check,
            hypothesis: hyp,
            lhs_label: "inradius of audited nodes".into(),
            lhs: r_in,
            rhs_label: rhs_label.into(),
            rhs,
            margin,
            tolerance,
            status,
            note: if vacuous {
                Some(vacuous_note.into())
            } else {
                None
            },
            details: details.clone(),
            provenance: provenance(field, ctx),
        }
    };
    let heinz_hyp = Hypothesis {
        certified: r_in.is_some(),
        reasons: vec![if r_in.is_some() {
            "any graph"
        } else {
            "mask has no interior"
        }
        .to_string()],
    };
    let heinz = build(CheckId::Heinz, heinz_hyp, heinz_rhs, "1 / inf |H_R|");
    let t3 = build(
        CheckId::T3,
        solution_hypothesis(ctx, &stats),
        t3_rhs,
        "1 / (2 sqrt 2 inf |H_R|)",
    );
    (heinz, t3)
}

/// `inradius <= 1 / inf |k|` over the regular set, asserted when the critical
/// set has finite accumulation depth.
pub fn check_theorem4(
    field: &ScalarField,
    critical: &CriticalSet,
    ctx: &FieldContext,
) -> TheoremReport {
    let stats = FieldStats::new(field);
    let floor = stats.noise_floor();
    let tau_grad = default_audit_tau_grad(field);
    let inf_k = stats
        .deep_jets()
        .filter(|j| j.grad_norm() >= tau_grad && j.grad_norm() > 0.0)
        .filter_map(|j| implicit_curvature(j).ok())
        .map(f64::abs)
        .reduce(f64::min);
    let depth = critical.depth();
    let hyp = Hypothesis {
        certified: depth.certified,
        reasons: vec![format!(
            "critical set: {} points in {} clusters, depth {}",
            critical.len(),
            depth.components,
            serde_json::to_string(&depth.depth).unwrap_or_default()
        )],
    };
    let r_in = inradius_of_set(field.grid(), &stats.deep);
    let tolerance = stats.h;
    let vacuous = inf_k.map_or(true, |v| v <= floor);
    let rhs = if vacuous {
        None
    } else {
        inf_k.map(|v| 1.0 / v)
    };
    let margin = match (r_in, rhs) {
        (Some(l), Some(r)) => Some(r - l),
        _ => None,
    };
    let status = match margin {
        _ if vacuous => Status::Vacuous,
        None => Status::Measured,
        Some(m) => status_for(hyp.certified, m, tolerance),
    };
    TheoremReport {
        check: CheckId::T4,
        hypothesis: hyp,
        lhs_label: "inradius of audited nodes".into(),
        lhs: r_in,
        rhs_label: "1 / inf |k|".into(),
        rhs,
        margin,
        tolerance,
        status,
        note: if vacuous {
            Some("inf |k| is at the noise floor: the bound is infinite".into())
        } else {
            None
        },
        details: json!({ "inf_abs_k": inf_k, "noise_floor": floor, "tau_grad": tau_grad,
            "depth": depth,
            "inradius_mask": inradius(field.mask()).ok(),
        }),
        provenance: provenance(field, ctx),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Overrides the default `t1` tolerance.
    pub t1: Option<f64>,
    pub eq1_c: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            t1: None,
            eq1_c: EQ1_TOLERANCE_C,
        }
    }
}

/// Runs the requested checks on one field, in the order given.
pub fn verify_field(
    field: &ScalarField,
    ctx: &FieldContext,
    checks: &[CheckId],
    tol: &Tolerances,
) -> Vec<TheoremReport> {
    let needs_critical = checks
        .iter()
        .any(|c| matches!(c, CheckId::T1 | CheckId::T4));
    let critical = needs_critical.then(|| {
        crate::curvature::find_critical_points(field, &crate::curvature::CriticalOptions::default())
    });
    let mut heinz_t3 = None;
    let mut out = Vec::new();
    for &c in checks {
        let r = match c {
            CheckId::T1 => check_theorem1(field, critical.as_ref().unwrap(), ctx, tol.t1),
            CheckId::Eq1 => check_eq1(field, ctx, tol.eq1_c),
            CheckId::Heinz | CheckId::T3 => {
                let (h, t) = heinz_t3.get_or_insert_with(|| check_heinz_and_theorem3(field, ctx));
                if c == CheckId::Heinz {
                    h.clone()
                } else {
                    t.clone()
                }
            }
            CheckId::T4 => check_theorem4(field, critical.as_ref().unwrap(), ctx),
        };
        out.push(r);
    }
    out
}
