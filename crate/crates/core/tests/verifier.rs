use spacelike_graphs::catalog::{plane_field, radial_solution};
use spacelike_graphs::curvature::{find_critical_points, CriticalOptions};
use spacelike_graphs::verifier::{
    check_heinz_and_theorem3, check_theorem1, check_theorem4, inradius, run_suite_json, CheckId,
    FieldContext, Status, SuiteOptions,
};
use spacelike_graphs::{expr, DomainMask, Grid2, INV_TWO_SQRT_TWO};

#[test]
fn inradius_examples() {
    let rect = DomainMask::rectangle(Grid2::spanning(0.0, 4.0, 0.0, 2.0, 129, 65).unwrap());
    assert!((inradius(&rect).unwrap() - 1.0).abs() <= rect.grid().h_max());
    let ann = DomainMask::annulus(0.0, 0.0, 1.0, 3.0, 129).unwrap();
    assert!((inradius(&ann).unwrap() - 1.0).abs() <= 1.5 * ann.grid().h_max());
    let disc = DomainMask::disc(0.0, 0.0, 1.5, 129).unwrap();
    assert!((inradius(&disc).unwrap() - 1.5).abs() <= 1.5 * disc.grid().h_max());
}

#[test]
fn vacuous_and_measured_cases() {
    let sq = DomainMask::rectangle(Grid2::square(-1.0, 1.0, 33).unwrap());
    let plane = plane_field(0.3, 0.4, 0.0, &sq).unwrap();
    let crit = find_critical_points(&plane, &CriticalOptions::default());
    assert_eq!(
        check_theorem1(&plane, &crit, &FieldContext::exact(), None).status,
        Status::Vacuous
    );
    let (heinz, t3) = check_heinz_and_theorem3(&plane, &FieldContext::exact());
    assert_eq!(
        (heinz.status, t3.status),
        (Status::Vacuous, Status::Vacuous)
    );
    assert_eq!(
        check_theorem4(&plane, &crit, &FieldContext::exact()).status,
        Status::Vacuous
    );

    let trough = expr::parse("x^2").unwrap().sample(&sq).unwrap();
    let crit = find_critical_points(&trough, &CriticalOptions::default());
    let t4 = check_theorem4(&trough, &crit, &FieldContext::unverified());
    assert!(!t4.hypothesis.certified);
    assert_ne!(t4.status, Status::Fail);
    assert!(t4.lhs.is_some());
}

#[test]
fn theorem3_rhs_is_exact_multiple() {
    for c in [0.2, 0.5, 0.8] {
        let mask = DomainMask::annulus(0.0, 0.0, 2.0, 4.0, 65).unwrap();
        let f = radial_solution(c, 2.0, 4.0, 0.0, 1e-12)
            .unwrap()
            .field(&mask, 0.0, 0.0)
            .unwrap();
        let (heinz, t3) = check_heinz_and_theorem3(&f, &FieldContext::exact());
        assert_eq!(t3.rhs.unwrap(), INV_TWO_SQRT_TWO * heinz.rhs.unwrap());
        assert_eq!(t3.status, Status::Pass);
    }
}

#[test]
fn suite_examples() {
    let opts = SuiteOptions::default();
    let empty = run_suite_json("[]", &opts).unwrap();
    assert!(empty.passed && empty.cases.is_empty());

    let manifest = r#"[
      {"id": "noisy", "kind": "expression",
       "params": {"expr": "0.3*x + 0.4*y", "noise": {"amplitude": 1e-3, "seed": 1},
                  "mask": {"shape": "rectangle", "x_lo": -1, "x_hi": 1, "y_lo": -1, "y_hi": 1, "nx": 33, "ny": 33}}},
      {"id": "broken", "kind": "catalog", "params": {"surface": {"kind": "torus"}}},
      {"id": "plane", "kind": "catalog", "params": {"surface": {"kind": "plane", "a": 0.1, "b": 0.2}, "n": 33},
       "checks": ["eq1", "t1"]}
    ]"#;
    let rep = run_suite_json(manifest, &opts).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.errors, 1);
    let ids: Vec<&str> = rep.cases.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, ["broken", "noisy", "plane"]);
    let noisy = &rep.cases[1];
    let eq1 = noisy
        .checks
        .iter()
        .find(|c| c.check == CheckId::Eq1)
        .unwrap();
    assert!(!eq1.hypothesis.certified);
    assert_eq!(eq1.status, Status::Measured);
    assert_eq!(rep.cases[2].checks.len(), 2);
    assert!(rep.table().contains("plane"));
}

#[test]
fn shipped_manifest_passes() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("manifests/default.json");
    let rep = spacelike_graphs::verifier::run_suite_file(&path, None).unwrap();
    assert!(rep.passed, "{}", rep.table());
    assert_eq!(rep.errors, 0);
    assert!(rep
        .cases
        .iter()
        .all(|c| c.checks.iter().all(|r| r.status != Status::Fail)));
}
