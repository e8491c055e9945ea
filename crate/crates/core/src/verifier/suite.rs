//! Manifest-driven verification runs.
//!
//! A manifest is a JSON list of cases:
//!
//! ```json
//! [{"id": "hemisphere", "kind": "catalog",
//!   "params": {"surface": {"kind": "hemisphere", "radius": 2},
//!              "mask": {"shape": "disc", "r": 1.5, "n": 129}},
//!   "checks": ["heinz", "t3"]}]
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{verify_field, CheckId, FieldContext, Status, TheoremReport, Tolerances};
use crate::catalog::CatalogSpec;
use crate::error::{Error, Result};
use crate::expr;
use crate::field::ScalarField;
use crate::fieldio;
use crate::request::{MaskSpec, SolveRequest};
use crate::solver::{self, solve_dirichlet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Catalog,
    Solve,
    Expression,
}

fn all_checks() -> Vec<CheckId> {
    CheckId::ALL.to_vec()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub id: String,
    pub kind: CaseKind,
    pub params: serde_json::Value,
    #[serde(default = "all_checks")]
    pub checks: Vec<CheckId>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogParams {
    surface: CatalogSpec,
    mask: Option<MaskSpec>,
    #[serde(default = "default_n")]
    n: usize,
}

fn default_n() -> usize {
    129
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpressionParams {
    expr: String,
    mask: MaskSpec,
    noise: Option<NoiseSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSummary {
    pub converged: bool,
    pub outer_iterations: usize,
    pub final_residual: f64,
    pub max_grad_norm: f64,
    /// Sup-distance to the reference field when the boundary data came from the catalog.
    pub error_vs_reference: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub id: String,
    pub kind: Option<CaseKind>,
    pub error: Option<String>,
    pub solve: Option<SolveSummary>,
    pub field_file: Option<String>,
    pub checks: Vec<TheoremReport>,
}

impl CaseReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub cases: Vec<CaseReport>,
    pub passed: bool,
    pub failures: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    /// Directory that relative paths in the manifest resolve against.
    pub base_dir: PathBuf,
    /// Where to write one field file per case; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
}

fn add_noise(field: &ScalarField, noise: &NoiseSpec) -> Result<ScalarField> {
    if !(noise.amplitude >= 0.0 && noise.amplitude.is_finite()) {
        return Err(Error::domain("noise amplitude must be finite and >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let kinds = field.mask().kinds();
    let values = field
        .values()
        .iter()
        .zip(kinds)
        .map(|(&v, k)| {
            if *k == crate::NodeKind::Exterior {
                v
            } else {
                v + noise.amplitude * rng.gen_range(-1.0..=1.0)
            }
        })
        .collect();
    ScalarField::new(field.mask().clone(), values)
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !id.starts_with('.')
}

fn run_case(
    spec: &CaseSpec,
    opts: &SuiteOptions,
) -> Result<(ScalarField, FieldContext, Option<SolveSummary>)> {
    match spec.kind {
        CaseKind::Catalog => {
            let p: CatalogParams = serde_json::from_value(spec.params.clone())?;
            let mask = match &p.mask {
                Some(m) => m.build(&opts.base_dir)?,
                None => p.surface.default_mask(p.n)?,
            };
            let field = p.surface.sample(&mask)?;
            let ctx = if p.surface.is_solution() {
                FieldContext {
                    solver_residual: solver::residual(&field).ok(),
                    ..FieldContext::exact()
                }
            } else {
                FieldContext::unverified()
            };
            Ok((field, ctx, None))
        }
        CaseKind::Solve => {
            let req: SolveRequest = serde_json::from_value(spec.params.clone())?;
            let m = req.materialize(&opts.base_dir)?;
            let (field, rep) = solve_dirichlet(&m.mask, &m.boundary, &req.config, m.init.as_ref())?;
            let error_vs_reference = match &m.reference {
                Some(r) => Some(field.sup_distance(r)?),
                None => None,
            };
            let summary = SolveSummary {
                converged: rep.converged,
                outer_iterations: rep.outer_iterations,
                final_residual: rep.final_residual,
                max_grad_norm: rep.max_grad_norm,
                error_vs_reference,
            };
            let ctx =
                FieldContext::solved(rep.converged, rep.final_residual, req.config.tol_residual);
            Ok((field, ctx, Some(summary)))
        }
        CaseKind::Expression => {
            let p: ExpressionParams = serde_json::from_value(spec.params.clone())?;
            let mask = p.mask.build(&opts.base_dir)?;
            let mut field = expr::parse(&p.expr)?.sample(&mask)?;
            if let Some(n) = &p.noise {
                field = add_noise(&field, n)?;
            }
            Ok((field, FieldContext::unverified(), None))
        }
    }
}

fn error_report(id: String, kind: Option<CaseKind>, e: impl ToString) -> CaseReport {
    CaseReport {
        id,
        kind,
        error: Some(e.to_string()),
        solve: None,
        field_file: None,
        checks: Vec::new(),
    }
}

fn execute(spec: &CaseSpec, opts: &SuiteOptions) -> CaseReport {
    if !valid_id(&spec.id) {
        return error_report(
            spec.id.clone(),
            Some(spec.kind),
            "case id must use only letters, digits, '_', '-', '.'",
        );
    }
    match run_case(spec, opts) {
        Err(e) => error_report(spec.id.clone(), Some(spec.kind), e),
        Ok((field, ctx, solve)) => {
            let checks = verify_field(&field, &ctx, &spec.checks, &spec.tolerances);
            let mut field_file = None;
            if let Some(dir) = &opts.out_dir {
                let name = format!("{}.fld", spec.id);
                if let Err(e) = fieldio::write_field(&field, dir.join(&name)) {
                    return error_report(spec.id.clone(), Some(spec.kind), e);
                }
                field_file = Some(name);
            }
            CaseReport {
                id: spec.id.clone(),
                kind: Some(spec.kind),
                error: None,
                solve,
                field_file,
                checks,
            }
        }
    }
}

/// Runs every entry; malformed entries become error reports and do not stop the
/// others. Reports are sorted by case id.
pub fn run_suite(entries: &[serde_json::Value], opts: &SuiteOptions) -> SuiteReport {
    let specs: Vec<std::result::Result<CaseSpec, CaseReport>> = entries
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let id = v
                .get("id")
                .and_then(|s| s.as_str())
                .map_or_else(|| format!("#{k}"), str::to_string);
            serde_json::from_value::<CaseSpec>(v.clone())
                .map_err(|e| error_report(id, None, format!("manifest entry {k}: {e}")))
        })
        .collect();
    let mut seen = std::collections::HashSet::new();
    let specs: Vec<_> = specs
        .into_iter()
        .map(|s| match s {
            Ok(c) if !seen.insert(c.id.clone()) => Err(error_report(
                c.id.clone(),
                Some(c.kind),
                "duplicate case id",
            )),
            other => other,
        })
        .collect();
    let mut cases: Vec<CaseReport> = specs
        .par_iter()
        .map(|s| match s {
            Ok(spec) => execute(spec, opts),
            Err(r) => r.clone(),
        })
        .collect();
    cases.sort_by(|a, b| a.id.cmp(&b.id));
    let failures = cases.iter().filter(|c| c.failed()).count();
    let errors = cases.iter().filter(|c| c.error.is_some()).count();
    SuiteReport {
        passed: failures == 0,
        failures,
        errors,
        cases,
    }
}

/// Parses a manifest (a JSON array of cases) and runs it.
pub fn run_suite_json(text: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    let entries: Vec<serde_json::Value> = serde_json::from_str(text)?;
    Ok(run_suite(&entries, opts))
}

/// Reads and runs a manifest file; relative paths resolve against its directory.
pub fn run_suite_file(path: &Path, out_dir: Option<PathBuf>) -> Result<SuiteReport> {
    let text = std::fs::read_to_string(path)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    run_suite_json(&text, &SuiteOptions { base_dir, out_dir })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"))
}

impl SuiteReport {
    /// Fixed-width table, one row per check.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<24} {:<6} {:<9} {:<5} {:>14} {:>14} {:>14} {:>12}",
            "case", "check", "status", "hyp", "lhs", "rhs", "margin", "tol"
        );
        for c in &self.cases {
            if let Some(e) = &c.error {
                let _ = writeln!(s, "{:<24} {:<6} {:<9} {}", c.id, "-", "error", e);
                continue;
            }
            for r in &c.checks {
                let status = match r.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Vacuous => "vacuous",
                    Status::Measured => "measured",
                };
                let _ = writeln!(
                    s,
                    "{:<24} {:<6} {:<9} {:<5} {:>14} {:>14} {:>14} {:>12.3e}",
                    c.id,
                    r.check.name(),
                    status,
                    if r.hypothesis.certified { "yes" } else { "no" },
                    fmt_opt(r.lhs),
                    fmt_opt(r.rhs),
                    fmt_opt(r.margin),
                    r.tolerance
                );
            }
        }
        let _ = writeln!(
            s,
            "{} cases, {} failed, {} errors: {}",
            self.cases.len(),
            self.failures,
            self.errors,
            if self.passed { "PASS" } else { "FAIL" }
        );
        s
    }
}
