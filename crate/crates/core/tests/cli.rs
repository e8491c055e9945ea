use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn spacelike(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spacelike"))
        .env("SPACELIKE_THREADS", "1")
        .args(args)
        .output()
        .unwrap()
}

fn crate_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn catalog_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.fld");
    let out = spacelike(&[
        "catalog",
        "--kind",
        "plane",
        "--a",
        "0.3",
        "--b",
        "0.4",
        "--c",
        "0",
        "--grid",
        "65",
        "--out",
        s(&f),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(std::fs::read_to_string(&f)
        .unwrap()
        .starts_with("FIELD2 v1 65 65"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.fld.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["command"], "catalog");
    assert_eq!(meta["parameters"]["surface"]["a"], 0.3);

    let out = spacelike(&["analyze", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["curvature"]["inf_abs_h_r"], 0.0);
    assert_eq!(rep["critical_points"].as_array().unwrap().len(), 0);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("g.fld");
    let out = spacelike(&[
        "catalog",
        "--kind",
        "plane",
        "--a",
        "0.3",
        "--b",
        "0",
        "--radius",
        "2",
        "--out",
        s(&f),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!f.exists());
    assert_eq!(
        spacelike(&["catalog", "--kind", "helicoid", "--out", s(&f)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(spacelike(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(spacelike(&[]).status.code(), Some(2));
    let out = spacelike(&["analyze", "/nonexistent/x.fld"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/x.fld"));
    assert_eq!(spacelike(&["--help"]).status.code(), Some(0));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(
        spacelike(&["verify", "--manifest", s(&bad)]).status.code(),
        Some(2)
    );
    assert_eq!(
        spacelike(&["solve", "--request", s(&bad), "--out", s(&f)])
            .status
            .code(),
        Some(2)
    );

    let out = Command::new(env!("CARGO_BIN_EXE_spacelike"))
        .env("SPACELIKE_THREADS", "zero")
        .args(["analyze", "x.fld"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_levels_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.fld");
    let req = crate_file("requests/annulus_radial.json");
    let out = spacelike(&["solve", "--request", s(&req), "--out", s(&u)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rep: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("u.fld.report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(rep["report"]["converged"], true);
    assert!(rep["report"]["final_residual"].as_f64().unwrap() <= 1e-8);
    assert!(rep["error_vs_reference"].as_f64().unwrap() < 1e-4);
    assert!(dir.path().join("u.fld.meta.json").exists());

    let svg = dir.path().join("out.svg");
    let curves = dir.path().join("curves.json");
    let out = spacelike(&[
        "levels",
        s(&u),
        "--at",
        "0.25",
        "--svg",
        s(&svg),
        "--out",
        s(&curves),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let c: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&curves).unwrap()).unwrap();
    assert_eq!(c.as_array().unwrap().len(), 1);
    assert_eq!(c[0]["closed"], true);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let report = dir.path().join("report.json");
    let out = spacelike(&[
        "verify",
        "--manifest",
        s(&crate_file("manifests/default.json")),
        "--out",
        s(&report),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["passed"], true);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let noisy = spacelike(&[
        "verify",
        "--manifest",
        s(&crate_file("manifests/noisy.json")),
    ]);
    assert_eq!(noisy.status.code(), Some(0));

    // a certified check forced to fail through an impossible tolerance
    let failing = dir.path().join("failing.json");
    std::fs::write(
        &failing,
        r#"[{"id": "saddle", "kind": "solve", "checks": ["t1"], "tolerances": {"t1": 1e-12},
             "params": {"mask": {"shape": "rectangle", "x_lo": -1, "x_hi": 1, "y_lo": -1, "y_hi": 1, "nx": 33, "ny": 33},
                        "boundary": "0.25*(x^2 - y^2) + 0.04*x*y + 0.03*x"}}]"#,
    )
    .unwrap();
    assert_eq!(
        spacelike(&["verify", "--manifest", s(&failing)])
            .status
            .code(),
        Some(1)
    );

    let erroring = dir.path().join("erroring.json");
    std::fs::write(
        &erroring,
        r#"[{"id": "x", "kind": "catalog", "params": {"surface": {"kind": "torus"}}}]"#,
    )
    .unwrap();
    assert_eq!(
        spacelike(&["verify", "--manifest", s(&erroring)])
            .status
            .code(),
        Some(2)
    );
}
