//! Closed-form mean curvatures against the divergence form on staggered faces.
//!
//! cargo run --example curvature_analysis

use spacelike_graphs::curvature::{curvature_field, divergence_mean_curvature, Ambient};
use spacelike_graphs::{expr, DomainMask, Result, DEFAULT_DELTA_SPACE};

fn max_gap(src: &str, n: usize, ambient: Ambient) -> Result<f64> {
    let mask = DomainMask::disc(0.0, 0.0, 1.0, n)?;
    let field = expr::parse(src)?.sample(&mask)?;
    let closed = curvature_field(&field, DEFAULT_DELTA_SPACE);
    let div = divergence_mean_curvature(&field, ambient)?;
    let deep = mask.deep_interior(1);
    let mut gap = 0.0f64;
    for (k, (p, d)) in closed.points.iter().zip(&div).enumerate() {
        if let (true, Some(p), Some(d)) = (deep[k], p, d) {
            let c = match ambient {
                Ambient::Euclidean => p.h_r,
                Ambient::Lorentzian => p.h_l.unwrap_or(f64::NAN),
            };
            gap = gap.max((c - d).abs());
        }
    }
    Ok(gap)
}

fn main() -> Result<()> {
    let fields = [
        "0.3*sin(x)*cos(y)",
        "0.1*exp(x*y) + 0.1*x",
        "sqrt(1 + x^2 + y^2) * 0.4",
    ];
    for src in fields {
        for ambient in [Ambient::Euclidean, Ambient::Lorentzian] {
            let (a, b) = (max_gap(src, 65, ambient)?, max_gap(src, 129, ambient)?);
            println!(
                "{src:<28} {ambient:?}: gap {a:.3e} -> {b:.3e}, order {:.2}",
                (a / b).log2()
            );
        }
    }
    Ok(())
}
