//! Acceptance criteria c01-c10. Every test writes one `PASS`/`FAIL` line to
//! standard error (uncaptured) and fails when its criterion is not met.
//! Supplementary measurements print as `INFO` lines.

use std::io::Write;
use std::path::Path;
use std::process::Command;

use spacelike_graphs::catalog::{radial_solution, CatalogSpec};
use spacelike_graphs::curvature::{
    curvature_field, divergence_mean_curvature, find_critical_points, AccumulationDepth, Ambient,
    CriticalKind, CriticalOptions,
};
use spacelike_graphs::levelset::implicit_curvature;
use spacelike_graphs::solver::{
    residual, solve_dirichlet, uniqueness_probe, BoundaryValues, ProbeConfig, SolveConfig,
};
use spacelike_graphs::verifier::{
    check_eq1, check_heinz_and_theorem3, check_theorem1, check_theorem4, inradius, FieldContext,
    Status, EQ1_TOLERANCE_C,
};
use spacelike_graphs::{
    expr, DomainMask, Grid2, Jet2, Result, ScalarField, DEFAULT_DELTA_SPACE, INV_TWO_SQRT_TWO,
};

fn emit(tag: &str, id: &str, msg: &str) {
    let _ = writeln!(std::io::stderr(), "{tag} {id} {msg}");
}

fn verdict(id: &str, pass: bool, msg: String) {
    emit(if pass { "PASS" } else { "FAIL" }, id, &msg);
    assert!(pass, "{id}: {msg}");
}

fn square(n: usize) -> DomainMask {
    DomainMask::rectangle(Grid2::square(-1.0, 1.0, n).unwrap())
}

fn radial_oracle() -> spacelike_graphs::catalog::RadialSolution {
    radial_solution(0.5, 1.0, 3.0, 0.0, 1e-12).unwrap()
}

#[test]
fn c01_catalog_residual_convergence() {
    let mut ok = true;
    let mut parts = Vec::new();

    // h = 2/64 on [-1,1]^2; dyadic coefficients sample exactly
    let mask = square(65);
    let dyadic = CatalogSpec::Plane {
        a: 0.25,
        b: -0.5,
        c: 0.125,
    }
    .sample(&mask)
    .unwrap();
    let r0 = residual(&dyadic).unwrap();
    ok &= r0 == 0.0;
    parts.push(format!("plane(0.25,-0.5) residual {r0:e}"));
    let generic = CatalogSpec::Plane {
        a: 0.3,
        b: 0.4,
        c: 0.0,
    }
    .sample(&mask)
    .unwrap();
    let r1 = residual(&generic).unwrap();
    ok &= r1 <= 1e-11;
    parts.push(format!(
        "plane(0.3,0.4) residual {r1:.1e} (sample rounding)"
    ));

    // h = 2/64 and h/2 on the 6-wide box around the annulus
    let surfaces = [
        CatalogSpec::Helicoid { a: 0.5 },
        CatalogSpec::Radial {
            c: 0.5,
            r_min: 1.0,
            r_max: 3.0,
            u0: 0.0,
            tol: 1e-12,
        },
    ];
    for spec in &surfaces {
        let res: Vec<f64> = [193, 385]
            .iter()
            .map(|&n| {
                let m = spec.default_mask(n).unwrap();
                assert!(
                    (m.grid().hx - 2.0 / 64.0 * (193 - 1) as f64 / (n - 1) as f64).abs() < 1e-15
                );
                residual(&spec.sample(&m).unwrap()).unwrap()
            })
            .collect();
        let ratio = res[0] / res[1];
        ok &= (3.2..=4.8).contains(&ratio);
        parts.push(format!(
            "{} ratio {ratio:.3} ({:.3e} -> {:.3e})",
            spec.name(),
            res[0],
            res[1]
        ));
    }
    verdict("c01", ok, parts.join("; "));
}

#[test]
fn c02_solver_accuracy() {
    let sol = radial_oracle();
    let cfg = SolveConfig::default();
    let mut ok = true;
    let mut errs = Vec::new();
    let mut parts = Vec::new();
    for n in [65, 129, 257] {
        let mask = DomainMask::annulus(0.0, 0.0, 1.0, 3.0, n).unwrap();
        let exact = sol.field(&mask, 0.0, 0.0).unwrap();
        let (u, rep) =
            solve_dirichlet(&mask, &BoundaryValues::from_field(&exact), &cfg, None).unwrap();
        let err = u.sup_distance(&exact).unwrap();
        ok &= rep.converged && rep.final_residual <= 1e-8;
        parts.push(format!(
            "n={n} res {:.2e} err {err:.3e}",
            rep.final_residual
        ));
        errs.push(err);
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    ok &= orders.iter().all(|&p| p >= 1.5);
    parts.push(format!("orders {:.2}, {:.2}", orders[0], orders[1]));
    verdict("c02", ok, parts.join("; "));
}

struct SaddleRun {
    converged: bool,
    residual: f64,
    points: usize,
    saddles: usize,
    abs_h_r: Option<f64>,
    h: f64,
}

fn saddle_run(src: &str, n: usize) -> Result<SaddleRun> {
    let mask = square(n);
    let g = BoundaryValues::from_field(&expr::parse(src)?.sample(&mask)?);
    let cfg = SolveConfig::default();
    let (u, rep) = solve_dirichlet(&mask, &g, &cfg, None)?;
    let crit = find_critical_points(&u, &CriticalOptions::default());
    let ctx = FieldContext::solved(rep.converged, rep.final_residual, cfg.tol_residual);
    let t1 = check_theorem1(&u, &crit, &ctx, None);
    Ok(SaddleRun {
        converged: rep.converged,
        residual: rep.final_residual,
        points: crit.len(),
        saddles: crit
            .points
            .iter()
            .filter(|p| p.kind == CriticalKind::Saddle)
            .count(),
        abs_h_r: t1.lhs,
        h: u.grid().h_max(),
    })
}

fn theorem1_criterion(src: &str) -> (bool, String) {
    let (a, b) = match (saddle_run(src, 129), saddle_run(src, 257)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return (false, format!("g = {src}: solve rejected: {e}")),
    };
    let one_saddle = a.points == 1 && a.saddles == 1;
    let va = a.abs_h_r.unwrap_or(f64::INFINITY);
    let vb = b.abs_h_r.unwrap_or(f64::INFINITY);
    let shrink = va / vb;
    let ok = a.converged && b.converged && one_saddle && va <= 5.0 * a.h && shrink >= 1.7;
    (
        ok,
        format!(
            "g = {src}: converged {}/{} (res {:.1e}), {} critical point(s) ({} saddle), |H_R| {va:.3e} (<= 5h = {:.3e}), at 257 {vb:.3e}, shrink {shrink:.2}",
            a.converged, b.converged, a.residual, a.points, a.saddles, 5.0 * a.h
        ),
    )
}

#[test]
fn c03_theorem1_saddle() {
    for (label, src) in [
        ("symmetric admissible data", "0.25*(x^2 - y^2)"),
        (
            "asymmetric admissible data",
            "0.25*(x^2 - y^2) + 0.04*x*y + 0.03*x",
        ),
    ] {
        let (ok, msg) = theorem1_criterion(src);
        emit(
            "INFO",
            "c03",
            &format!(
                "{label} (criterion {}): {msg}",
                if ok { "met" } else { "not met" }
            ),
        );
    }
    let (ok, msg) = theorem1_criterion("x^2 - y^2");
    verdict("c03", ok, msg);
}

fn eq1_line(name: &str, field: &ScalarField, ctx: &FieldContext) -> (bool, String) {
    let r = check_eq1(field, ctx, EQ1_TOLERANCE_C);
    let exceed = r.details["exceed_count"].as_u64().unwrap_or(u64::MAX);
    let ok = r.status == Status::Pass && exceed == 0;
    (
        ok,
        format!(
            "{name} max {:.2e} tol {:.2e} exceed {exceed}",
            r.lhs.unwrap_or(f64::NAN),
            r.tolerance
        ),
    )
}

#[test]
fn c04_eq1_audit() {
    let mut ok = true;
    let mut parts = Vec::new();
    let catalog = [
        CatalogSpec::Plane {
            a: 0.3,
            b: 0.4,
            c: 0.0,
        },
        CatalogSpec::Helicoid { a: 0.5 },
        CatalogSpec::Radial {
            c: 0.5,
            r_min: 1.0,
            r_max: 3.0,
            u0: 0.0,
            tol: 1e-12,
        },
    ];
    for spec in &catalog {
        let f = spec.sample(&spec.default_mask(129).unwrap()).unwrap();
        let (p, m) = eq1_line(spec.name(), &f, &FieldContext::exact());
        ok &= p;
        parts.push(m);
    }

    let cfg = SolveConfig::default();
    let saddle = |src: &str| -> Result<(bool, String)> {
        let mask = square(129);
        let g = BoundaryValues::from_field(&expr::parse(src)?.sample(&mask)?);
        let (u, rep) = solve_dirichlet(&mask, &g, &cfg, None)?;
        let ctx = FieldContext::solved(rep.converged, rep.final_residual, cfg.tol_residual);
        Ok(eq1_line("saddle solve", &u, &ctx))
    };
    match saddle("0.25*(x^2 - y^2) + 0.04*x*y + 0.03*x") {
        Ok((p, m)) => emit(
            "INFO",
            "c04",
            &format!(
                "admissible saddle data: {m} ({})",
                if p { "pass" } else { "fail" }
            ),
        ),
        Err(e) => emit("INFO", "c04", &format!("admissible saddle data: {e}")),
    }
    match saddle("x^2 - y^2") {
        Ok((p, m)) => {
            ok &= p;
            parts.push(m);
        }
        Err(e) => {
            ok = false;
            parts.push(format!("saddle solve g = x^2 - y^2 unavailable: {e}"));
        }
    }
    verdict("c04", ok, parts.join("; "));
}

#[test]
fn c05_heinz_and_theorem3() {
    let mut ok = true;
    let mut parts = Vec::new();

    let hemi = CatalogSpec::Hemisphere { radius: 2.0 };
    let f = hemi
        .sample(&DomainMask::disc(0.0, 0.0, 1.5, 129).unwrap())
        .unwrap();
    let h = f.grid().h_max();
    let (heinz, _) = check_heinz_and_theorem3(&f, &FieldContext::unverified());
    let margin = heinz.margin.unwrap_or(f64::NEG_INFINITY);
    ok &= heinz.status == Status::Pass && margin >= 0.5 - 2.0 * h;
    parts.push(format!(
        "hemisphere Heinz margin {margin:.4} (>= {:.4})",
        0.5 - 2.0 * h
    ));

    let radial = CatalogSpec::Radial {
        c: 0.5,
        r_min: 1.0,
        r_max: 3.0,
        u0: 0.0,
        tol: 1e-12,
    };
    let f = radial.sample(&radial.default_mask(129).unwrap()).unwrap();
    let (heinz, t3) = check_heinz_and_theorem3(&f, &FieldContext::exact());
    ok &= t3.status == Status::Pass;
    parts.push(format!(
        "radial T3 inradius {:.4} <= {:.4}",
        t3.lhs.unwrap_or(f64::NAN),
        t3.rhs.unwrap_or(f64::NAN)
    ));
    let exact_ratio = match (heinz.rhs, t3.rhs) {
        (Some(a), Some(b)) => b == INV_TWO_SQRT_TWO * a,
        _ => false,
    };
    ok &= exact_ratio;
    parts.push(format!(
        "T3 rhs == Heinz rhs / (2 sqrt 2) exactly: {exact_ratio}"
    ));
    verdict("c05", ok, parts.join("; "));
}

#[test]
fn c06_theorem4_tightness() {
    let mask = DomainMask::disc(0.0, 0.0, 1.0, 129).unwrap();
    let h = mask.grid().h_max();
    let f = expr::parse("(x^2 + y^2)/2").unwrap().sample(&mask).unwrap();
    let crit = find_critical_points(&f, &CriticalOptions::default());
    let depth = crit.depth();
    let r = check_theorem4(&f, &crit, &FieldContext::unverified());
    let rhs = r.rhs.unwrap_or(f64::NAN);
    let lhs = r.lhs.unwrap_or(f64::NAN);
    let mask_inr = inradius(&mask).unwrap();
    let ok = r.hypothesis.certified
        && depth.depth == AccumulationDepth::Finite(1)
        && r.status == Status::Pass
        && (lhs - rhs).abs() <= 2.0 * h
        && (mask_inr - rhs).abs() <= 2.0 * h;
    verdict(
        "c06",
        ok,
        format!(
            "depth {:?}, 1/inf|k| {rhs:.5}, inradius (audited set) {lhs:.5}, inradius (mask) {mask_inr:.5}, 2h {:.5}",
            depth.depth,
            2.0 * h
        ),
    );
}

#[test]
fn c07_uniqueness_probe() {
    let mask = DomainMask::annulus(0.0, 0.0, 1.0, 3.0, 65).unwrap();
    let exact = radial_oracle().field(&mask, 0.0, 0.0).unwrap();
    let cfg = SolveConfig::default();
    let rep = uniqueness_probe(
        &mask,
        &BoundaryValues::from_field(&exact),
        &cfg,
        &ProbeConfig::default(),
    )
    .unwrap();
    let all = rep.starts.len() == 3 && rep.starts.iter().all(|s| s.converged);
    let d = rep.max_pairwise_distance.unwrap_or(f64::INFINITY);
    let min_hr = rep
        .starts
        .iter()
        .map(|s| s.min_abs_h_r)
        .fold(f64::INFINITY, f64::min);
    let ok = all && d <= 10.0 * cfg.tol_residual && min_hr > 0.0 && rep.h_r_bounded_away;
    verdict(
        "c07",
        ok,
        format!("3 starts converged {all}, max pairwise distance {d:.2e} (<= {:.0e}), min |H_R| {min_hr:.4}", 10.0 * cfg.tol_residual),
    );
}

fn oracle_gap(src: &str, n: usize, ambient: Ambient) -> f64 {
    let mask = square(n);
    let f = expr::parse(src).unwrap().sample(&mask).unwrap();
    let closed = curvature_field(&f, DEFAULT_DELTA_SPACE);
    let div = divergence_mean_curvature(&f, ambient).unwrap();
    closed
        .points
        .iter()
        .zip(&div)
        .filter_map(|(p, d)| {
            let (p, d) = (p.as_ref()?, (*d)?);
            let c = match ambient {
                Ambient::Euclidean => p.h_r,
                Ambient::Lorentzian => p.h_l?,
            };
            Some((c - d).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn c08_oracle_equivalence() {
    let mut ok = true;
    let mut parts = Vec::new();
    for src in [
        "0.3*sin(x)*cos(y)",
        "0.1*exp(x*y) + 0.1*x",
        "0.4*sqrt(1 + x^2 + y^2)",
    ] {
        for amb in [Ambient::Euclidean, Ambient::Lorentzian] {
            let p = (oracle_gap(src, 129, amb) / oracle_gap(src, 257, amb)).log2();
            ok &= p >= 1.8;
            parts.push(format!("{src} {amb:?} {p:.2}"));
        }
    }
    verdict("c08", ok, format!("orders: {}", parts.join(", ")));
}

fn rotate_quarter(f: &ScalarField) -> Vec<f64> {
    // value at (x, y) of the field rotated by 90 degrees: u(y, -x)
    let g = f.grid();
    let mut out = vec![0.0; g.len()];
    for j in 0..g.ny {
        for i in 0..g.nx {
            out[g.idx(i, j)] = f.values()[g.idx(g.nx - 1 - j, i)];
        }
    }
    out
}

#[test]
fn c09_invariants() {
    let mut parts = Vec::new();
    let mut ok = true;
    let cfg = SolveConfig::default();

    // maximum principle
    let mask = DomainMask::annulus(0.0, 0.0, 1.0, 3.0, 65).unwrap();
    let g = BoundaryValues::from_field(&radial_oracle().field(&mask, 0.0, 0.0).unwrap());
    let (u, _) = solve_dirichlet(&mask, &g, &cfg, None).unwrap();
    let (lo, hi) = g.range();
    let mp = u
        .active_values()
        .all(|v| v >= lo - 1e-10 && v <= hi + 1e-10);
    ok &= mp;
    parts.push(format!("max principle {mp}"));

    // u -> -u and quarter rotation on a square
    let mask = square(65);
    let src = "0.25*(x^2 - y^2) + 0.04*x*y + 0.03*x + 0.05*y";
    let g = BoundaryValues::from_field(&expr::parse(src).unwrap().sample(&mask).unwrap());
    let (u, _) = solve_dirichlet(&mask, &g, &cfg, None).unwrap();
    let (un, _) = solve_dirichlet(&mask, &g.negated(), &cfg, None).unwrap();
    let neg = u.values().iter().zip(un.values()).all(|(a, b)| *a == -*b);
    ok &= neg;
    parts.push(format!("u -> -u bit-exact {neg}"));
    let rotated = ScalarField::new(mask.clone(), rotate_quarter(&u)).unwrap();
    let (ur, _) =
        solve_dirichlet(&mask, &BoundaryValues::from_field(&rotated), &cfg, None).unwrap();
    let rot = ur.sup_distance(&rotated).unwrap();
    ok &= rot <= 10.0 * cfg.tol_residual;
    parts.push(format!("rotation sup-diff {rot:.1e}"));

    // k invariances, exact
    let j = Jet2::new(0.3, [0.4, -0.2], [1.1, 0.3, -0.7]);
    let k = implicit_curvature(&j).unwrap();
    let shifted = Jet2 { u: j.u + 5.0, ..j };
    let scaled = Jet2::new(2.0 * j.u, j.du.map(|v| 2.0 * v), j.d2u.map(|v| 2.0 * v));
    let flipped = Jet2::new(-j.u, j.du.map(|v| -v), j.d2u.map(|v| -v));
    let kinv = implicit_curvature(&shifted).unwrap() == k
        && implicit_curvature(&scaled).unwrap() == k
        && implicit_curvature(&flipped).unwrap() == -k;
    ok &= kinv;
    parts.push(format!("k shift/scale/sign {kinv}"));

    // inradius monotone under inclusion
    let grid = Grid2::square(-1.0, 1.0, 97).unwrap();
    let radii = [0.3, 0.55, 0.8, 1.0];
    let inr: Vec<f64> = radii
        .iter()
        .map(|&r| {
            inradius(&DomainMask::from_predicate(grid, |x, y| x.hypot(y) <= r).unwrap()).unwrap()
        })
        .collect();
    let mono = inr.windows(2).all(|w| w[0] <= w[1]);
    ok &= mono;
    parts.push(format!("inradius monotone {mono}"));

    // expression round trip
    let exprs = [
        "-x^2",
        "2^3^2",
        "(x - y) * (x + y) / 3",
        "atan2(y, -x) + min(x, max(y, 0.5))",
        "-(-x)^-2",
    ];
    let rt = exprs.iter().all(|s| {
        let e = expr::parse(s).unwrap();
        expr::parse(&e.to_string()).unwrap() == e
    });
    ok &= rt;
    parts.push(format!("expression round trip {rt}"));
    verdict("c09", ok, parts.join("; "));
}

fn run_verify(out: &Path) -> std::process::ExitStatus {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("manifests/default.json");
    Command::new(env!("CARGO_BIN_EXE_spacelike"))
        .env("SPACELIKE_THREADS", "1")
        .arg("verify")
        .arg("--manifest")
        .arg(&manifest)
        .arg("--out")
        .arg(out.join("report.json"))
        .arg("--fields-dir")
        .arg(out.join("fields"))
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn c10_determinism() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (sa, sb) = (run_verify(a.path()), run_verify(b.path()));
    let report_a = std::fs::read(a.path().join("report.json")).unwrap();
    let report_b = std::fs::read(b.path().join("report.json")).unwrap();
    let fields_a = read_dir_sorted(&a.path().join("fields"));
    let fields_b = read_dir_sorted(&b.path().join("fields"));
    let ok = sa.success()
        && sb.success()
        && report_a == report_b
        && !fields_a.is_empty()
        && fields_a == fields_b;
    verdict(
        "c10",
        ok,
        format!(
            "exit {:?}/{:?}, report {} bytes identical {}, {} field files identical {}",
            sa.code(),
            sb.code(),
            report_a.len(),
            report_a == report_b,
            fields_a.len(),
            fields_a == fields_b
        ),
    );
}
