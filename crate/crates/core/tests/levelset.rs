use spacelike_graphs::catalog::{helicoid_field, plane_field, radial_solution};
use spacelike_graphs::levelset::{
    audit_inequality_1, default_audit_tau_grad, extract_levels, implicit_curvature,
    polyline_curvature, to_svg,
};
use spacelike_graphs::{expr, DomainMask, Grid2, Jet2};

#[test]
fn implicit_curvature_examples() {
    let circle = Jet2::new(0.125, [0.5, 0.0], [1.0, 0.0, 1.0]);
    assert!((implicit_curvature(&circle).unwrap() - 2.0).abs() < 1e-15);
    assert_eq!(
        implicit_curvature(&Jet2::new(0.0, [1.0, 0.0], [0.0; 3])).unwrap(),
        0.0
    );
    // x^2 - y^2 = 0 is the line y = x through (1, 1)
    let hyp = Jet2::new(0.0, [2.0, -2.0], [2.0, 0.0, -2.0]);
    assert_eq!(implicit_curvature(&hyp).unwrap(), 0.0);
    // x^2 - y^2 = 3 at (2, 1): hyperbola, curvature -a^2/(x^2+y^2)^{3/2} toward decreasing u
    let j = Jet2::new(3.0, [4.0, -2.0], [2.0, 0.0, -2.0]);
    let want = 3.0 / 5f64.powf(1.5);
    assert!((implicit_curvature(&j).unwrap().abs() - want).abs() < 1e-14);
    assert!(implicit_curvature(&Jet2::new(0.0, [0.0, 0.0], [1.0, 0.0, 1.0])).is_err());
}

#[test]
fn circle_level_is_accurate() {
    let mask = DomainMask::disc(0.0, 0.0, 1.0, 129).unwrap();
    let h = mask.grid().h_max();
    let f = expr::parse("(x^2 + y^2)/2").unwrap().sample(&mask).unwrap();
    let curves = extract_levels(&f, 0.125);
    assert_eq!(curves.len(), 1);
    let c = &curves[0];
    assert!(c.closed);
    assert_eq!(c.vertices.first(), c.vertices.last());
    for v in &c.vertices {
        assert!((v[0].hypot(v[1]) - 0.5).abs() <= h * h);
    }
    // k comes from the nearest node, which sits up to h/sqrt(2) off the circle
    assert!(c.curvature.iter().all(|k| (k - 2.0).abs() <= 3.0 * h));
    assert!(extract_levels(&f, 10.0).is_empty());
}

#[test]
fn polyline_and_jet_curvature_agree_in_sign() {
    let mask = DomainMask::disc(0.0, 0.0, 1.0, 97).unwrap();
    let h = mask.grid().h_max();
    let f = expr::parse("x^2 + 2*y^2 + 0.3*x*y")
        .unwrap()
        .sample(&mask)
        .unwrap();
    for level in [0.05, 0.2, 0.4] {
        for c in extract_levels(&f, level) {
            let poly = polyline_curvature(&c);
            let pairs: Vec<(f64, f64)> = poly
                .iter()
                .zip(&c.curvature)
                .filter_map(|(p, k)| p.map(|p| (p, *k)))
                .collect();
            let same = pairs
                .iter()
                .filter(|(p, k)| p.signum() == k.signum())
                .count();
            assert!(same as f64 >= 0.95 * pairs.len() as f64);
            let mean = |v: &mut dyn Iterator<Item = f64>| {
                let all: Vec<f64> = v.collect();
                all.iter().sum::<f64>() / all.len() as f64
            };
            let mp = mean(&mut pairs.iter().map(|p| p.0));
            let mk = mean(&mut pairs.iter().map(|p| p.1));
            assert!((mp - mk).abs() <= 10.0 * h * mk.abs().max(1.0), "{mp} {mk}");
        }
    }
}

#[test]
fn audits_on_catalog_fields() {
    let sq = DomainMask::rectangle(Grid2::square(-1.0, 1.0, 33).unwrap());
    let plane = plane_field(0.3, 0.4, 0.0, &sq).unwrap();
    let a = audit_inequality_1(&plane, default_audit_tau_grad(&plane), 1e-10).unwrap();
    assert_eq!(a.exceed_count, 0);
    assert!(a.max_violation.unwrap() <= 1e-10);

    let ann = DomainMask::slit_annulus(0.0, 0.0, 1.0, 3.0, 129).unwrap();
    let h = ann.grid().h_max();
    let hel = helicoid_field(0.5, &ann).unwrap();
    let a = audit_inequality_1(&hel, default_audit_tau_grad(&hel), h * h).unwrap();
    assert_eq!(a.exceed_count, 0);

    let ann = DomainMask::annulus(0.0, 0.0, 1.0, 3.0, 129).unwrap();
    let rad = radial_solution(0.5, 1.0, 3.0, 0.0, 1e-12)
        .unwrap()
        .field(&ann, 0.0, 0.0)
        .unwrap();
    let a = audit_inequality_1(&rad, default_audit_tau_grad(&rad), h * h).unwrap();
    assert_eq!(a.exceed_count, 0);
    assert!(a.max_violation.unwrap() < 0.0);
}

#[test]
fn svg_is_standalone() {
    let mask = DomainMask::disc(0.0, 0.0, 1.0, 33).unwrap();
    let f = expr::parse("x^2 + y^2").unwrap().sample(&mask).unwrap();
    let curves = extract_levels(&f, 0.25);
    let svg = to_svg(f.grid(), &curves, 300.0);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("href"));
}
