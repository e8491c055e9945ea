//! Samples the reference surfaces and checks them against the discrete equation.
//!
//! cargo run --example catalog_fields

use spacelike_graphs::catalog::CatalogSpec;
use spacelike_graphs::curvature::curvature_field;
use spacelike_graphs::solver::residual;
use spacelike_graphs::{Result, DEFAULT_DELTA_SPACE};

fn main() -> Result<()> {
    let surfaces = [
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
        CatalogSpec::Hemisphere { radius: 2.0 },
    ];
    println!(
        "{:<11} {:>5} {:>12} {:>12} {:>12} {:>10}",
        "surface", "n", "residual", "inf|H_R|", "max|H_R-H_L|", "max|Du|"
    );
    for spec in &surfaces {
        for n in [65, 129] {
            let field = spec.sample(&spec.default_mask(n)?)?;
            let curv = curvature_field(&field, DEFAULT_DELTA_SPACE);
            let gap = curv
                .points
                .iter()
                .flatten()
                .filter_map(|p| p.h_l.map(|hl| (p.h_r - hl).abs()))
                .fold(0.0f64, f64::max);
            println!(
                "{:<11} {:>5} {:>12} {:>12.3e} {:>12.3e} {:>10.4}",
                spec.name(),
                n,
                // the hemisphere turns timelike before its rim
                residual(&field).map_or("timelike".into(), |r| format!("{r:.3e}")),
                curv.summary.inf_abs_h_r.unwrap_or(f64::NAN),
                gap,
                field.max_grad_norm()
            );
        }
    }
    Ok(())
}
