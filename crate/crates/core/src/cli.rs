//! Command-line front end. Exit codes: 0 success, 1 failed verification,
//! 2 usage, parse or computation errors.
//!
//! Every output file `F` gets a run-metadata sidecar `F.meta.json`. The worker
//! thread count comes from `SPACELIKE_THREADS` (default: all cores); with `1`
//! every output except the sidecars is bit-reproducible.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::catalog::{radial_solution, CatalogSpec};
use crate::curvature::{curvature_field, find_critical_points, CriticalOptions};
use crate::error::{Error, Result};
use crate::field::{ScalarField, DEFAULT_DELTA_SPACE};
use crate::fieldio;
use crate::levelset::{audit_inequality_1, default_audit_tau_grad, extract_levels, to_svg};
use crate::request::{MaskSpec, SolveRequest};
use crate::solver::{residual, solve_dirichlet};
use crate::verifier::{inradius, run_suite_file, EQ1_TOLERANCE_C};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "SPACELIKE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "spacelike",
    version,
    about = "Spacelike graphs with equal Euclidean and Lorentzian mean curvature"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a reference surface to a field file.
    Catalog(CatalogArgs),
    /// Solve a Dirichlet problem described by a JSON request.
    Solve(SolveArgs),
    /// Curvature summary, critical points and inradius of a field.
    Analyze(AnalyzeArgs),
    /// Level curves with signed curvature, optionally as SVG.
    Levels(LevelsArgs),
    /// Run a verification manifest.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Plane,
    Helicoid,
    Hemisphere,
    Radial,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    #[arg(long)]
    pub kind: Kind,
    /// Plane x-slope or helicoid pitch.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Plane y-slope.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Plane offset.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Hemisphere radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Radial flux constant.
    #[arg(long)]
    pub flux: Option<f64>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u0: Option<f64>,
    /// Nodes per side of the default mask.
    #[arg(long, default_value_t = 129)]
    pub grid: usize,
    /// JSON mask description replacing the default mask.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub request: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub field: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LevelsArgs {
    pub field: PathBuf,
    #[arg(long = "at", required = true, allow_hyphen_values = true)]
    pub at: Vec<f64>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Write curves here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// JSON report destination (the table always goes to standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory receiving one field file per case.
    #[arg(long)]
    pub fields_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    parameters: serde_json::Value,
    threads: usize,
    wall_time_s: f64,
}

fn write_meta(
    output: &Path,
    command: &str,
    parameters: serde_json::Value,
    started: Instant,
) -> Result<()> {
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        parameters,
        threads: rayon::current_num_threads(),
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    let mut name = output.as_os_str().to_owned();
    name.push(".meta.json");
    write_json(Path::new(&name), &meta)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    at_path(path, std::fs::write(path, text).map_err(Error::from))
}

fn emit(out: Option<&Path>, value: &impl Serialize) -> Result<()> {
    use std::io::Write;
    match out {
        Some(p) => write_json(p, value),
        None => {
            let text = serde_json::to_string_pretty(value)?;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

/// Prefixes I/O errors with the offending path.
fn at_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    })
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn catalog_spec(a: &CatalogArgs) -> Result<CatalogSpec> {
    let given = [
        ("a", a.a.is_some()),
        ("b", a.b.is_some()),
        ("c", a.c.is_some()),
        ("radius", a.radius.is_some()),
        ("flux", a.flux.is_some()),
        ("r-min", a.r_min.is_some()),
        ("r-max", a.r_max.is_some()),
        ("u0", a.u0.is_some()),
    ];
    let allowed: &[&str] = match a.kind {
        Kind::Plane => &["a", "b", "c"],
        Kind::Helicoid => &["a"],
        Kind::Hemisphere => &["radius"],
        Kind::Radial => &["flux", "r-min", "r-max", "u0"],
    };
    if let Some((flag, _)) = given.iter().find(|(f, set)| *set && !allowed.contains(f)) {
        return Err(Error::domain(
            format!("--{flag} does not apply to --kind {:?}", a.kind).to_lowercase(),
        ));
    }
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Error::domain(format!("--{flag} is required")))
    };
    Ok(match a.kind {
        Kind::Plane => CatalogSpec::Plane {
            a: need(a.a, "a")?,
            b: need(a.b, "b")?,
            c: a.c.unwrap_or(0.0),
        },
        Kind::Helicoid => CatalogSpec::Helicoid { a: need(a.a, "a")? },
        Kind::Hemisphere => CatalogSpec::Hemisphere {
            radius: need(a.radius, "radius")?,
        },
        Kind::Radial => CatalogSpec::Radial {
            c: need(a.flux, "flux")?,
            r_min: need(a.r_min, "r-min")?,
            r_max: need(a.r_max, "r-max")?,
            u0: a.u0.unwrap_or(0.0),
            tol: 1e-12,
        },
    })
}

fn cmd_catalog(a: &CatalogArgs) -> Result<i32> {
    let started = Instant::now();
    let spec = catalog_spec(a)?;
    let mask = match &a.mask {
        Some(p) => {
            let text = at_path(p, std::fs::read_to_string(p).map_err(Error::from))?;
            let m: MaskSpec = serde_json::from_str(&text)?;
            m.build(&base_dir(p))?
        }
        None => spec.default_mask(a.grid)?,
    };
    let field = spec.sample(&mask)?;
    at_path(&a.out, fieldio::write_field(&field, &a.out))?;
    let mut provenance = json!({ "surface": spec, "grid": field.grid() });
    if let CatalogSpec::Radial {
        c,
        r_min,
        r_max,
        u0,
        tol,
    } = spec
    {
        provenance["radial_table"] =
            serde_json::to_value(radial_solution(c, r_min, r_max, u0, tol)?.params())?;
    }
    write_meta(&a.out, "catalog", provenance, started)?;
    Ok(0)
}

fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let started = Instant::now();
    let req = at_path(&a.request, SolveRequest::read(&a.request))?;
    let m = req.materialize(&base_dir(&a.request))?;
    let (field, report) = solve_dirichlet(&m.mask, &m.boundary, &req.config, m.init.as_ref())?;
    at_path(&a.out, fieldio::write_field(&field, &a.out))?;
    let mut report_path = a.out.as_os_str().to_owned();
    report_path.push(".report.json");
    let error_vs_reference = match &m.reference {
        Some(r) => Some(field.sup_distance(r)?),
        None => None,
    };
    let body = json!({ "report": report, "error_vs_reference": error_vs_reference });
    write_json(Path::new(&report_path), &body)?;
    write_meta(&a.out, "solve", serde_json::to_value(&req)?, started)?;
    if !report.converged {
        eprintln!(
            "warning: solver stopped after {} outer iterations with residual {:.3e}",
            report.outer_iterations, report.final_residual
        );
    }
    Ok(0)
}

/// The JSON document produced by `analyze`.
pub fn analyze_report(field: &ScalarField) -> Result<serde_json::Value> {
    let curv = curvature_field(field, DEFAULT_DELTA_SPACE);
    let crit = find_critical_points(field, &CriticalOptions::default());
    let spacelike = field.is_spacelike(DEFAULT_DELTA_SPACE);
    let audit = if spacelike {
        let h = field.grid().h_max();
        Some(audit_inequality_1(
            field,
            default_audit_tau_grad(field),
            EQ1_TOLERANCE_C * h * h,
        )?)
    } else {
        None
    };
    Ok(json!({
        "grid": field.grid(),
        "curvature": curv.summary,
        "residual": if spacelike { residual(field).ok() } else { None },
        "critical_points": crit.points,
        "depth": crit.depth(),
        "inradius": inradius(field.mask()).ok(),
        "eq1_audit": audit,
    }))
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<i32> {
    let started = Instant::now();
    let field = at_path(&a.field, fieldio::read_field(&a.field))?;
    let report = analyze_report(&field)?;
    emit(a.out.as_deref(), &report)?;
    if let Some(out) = &a.out {
        write_meta(out, "analyze", json!({ "field": a.field }), started)?;
    }
    Ok(0)
}

fn cmd_levels(a: &LevelsArgs) -> Result<i32> {
    let started = Instant::now();
    if a.at.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("levels must be finite"));
    }
    let field = at_path(&a.field, fieldio::read_field(&a.field))?;
    let curves: Vec<_> =
        a.at.iter()
            .flat_map(|&l| extract_levels(&field, l))
            .collect();
    emit(a.out.as_deref(), &curves)?;
    let params = json!({ "field": a.field, "levels": a.at });
    if let Some(out) = &a.out {
        write_meta(out, "levels", params.clone(), started)?;
    }
    if let Some(svg) = &a.svg {
        at_path(
            svg,
            std::fs::write(svg, to_svg(field.grid(), &curves, 600.0)).map_err(Error::from),
        )?;
        write_meta(svg, "levels", params, started)?;
    }
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let started = Instant::now();
    if let Some(dir) = &a.fields_dir {
        std::fs::create_dir_all(dir)?;
    }
    let report = at_path(
        &a.manifest,
        run_suite_file(&a.manifest, a.fields_dir.clone()),
    )?;
    print!("{}", report.table());
    for c in report.cases.iter().filter(|c| c.error.is_some()) {
        eprintln!(
            "error in case {}: {}",
            c.id,
            c.error.as_deref().unwrap_or_default()
        );
    }
    if let Some(out) = &a.out {
        write_json(out, &report)?;
        write_meta(
            out,
            "verify",
            json!({ "manifest": a.manifest, "fields_dir": a.fields_dir }),
            started,
        )?;
    }
    Ok(if !report.passed {
        1
    } else if report.errors > 0 {
        2
    } else {
        0
    })
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::domain(format!(
            "{THREADS_ENV} must be a positive integer, got {v:?}"
        ))
    })?;
    // a second initialization (e.g. repeated calls in one process) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parses arguments, runs one command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Catalog(a) => cmd_catalog(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Levels(a) => cmd_levels(a),
        Command::Verify(a) => cmd_verify(a),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
