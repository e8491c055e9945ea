//! Level curves of a radial solution with their signed curvature, written as SVG.
//!
//! cargo run --example level_curves -- [out.svg]

use spacelike_graphs::catalog::radial_solution;
use spacelike_graphs::levelset::{extract_levels, polyline_curvature, to_svg};
use spacelike_graphs::{DomainMask, Result};

fn main() -> Result<()> {
    let sol = radial_solution(0.5, 1.0, 3.0, 0.0, 1e-12)?;
    let mask = DomainMask::annulus(0.0, 0.0, 1.0, 3.0, 129)?;
    let field = sol.field(&mask, 0.0, 0.0)?;

    let mut all = Vec::new();
    for r in [1.5, 2.0, 2.5] {
        let level = sol.u_at(r);
        for c in extract_levels(&field, level) {
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let poly: Vec<f64> = polyline_curvature(&c).into_iter().flatten().collect();
            println!(
                "r = {r}: {} vertices, closed {}, jet k = {:.6}, polyline k = {:.6}, 1/r = {:.6}",
                c.vertices.len(),
                c.closed,
                mean(&c.curvature),
                mean(&poly),
                1.0 / r
            );
            all.push(c);
        }
    }

    let out = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("level_curves.svg")
            .display()
            .to_string()
    });
    std::fs::write(&out, to_svg(field.grid(), &all, 500.0))?;
    println!("wrote {out}");
    Ok(())
}
