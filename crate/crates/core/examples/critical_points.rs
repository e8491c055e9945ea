//! Critical points, their classification, and the accumulation depth of the set.
//!
//! cargo run --example critical_points

use spacelike_graphs::curvature::{find_critical_points, CriticalOptions};
use spacelike_graphs::{expr, DomainMask, Grid2, Result};

fn main() -> Result<()> {
    let mask = DomainMask::rectangle(Grid2::square(-1.0, 1.0, 65)?);
    let cases = [
        "(x^2 + y^2)/2",
        "0.25*(x^2 - y^2) + 0.05*x",
        "0.3*sin(3*x)*sin(3*y)",
        "0.2*x^2",
    ];
    for src in cases {
        let field = expr::parse(src)?.sample(&mask)?;
        let set = find_critical_points(&field, &CriticalOptions::default());
        let depth = set.depth();
        println!(
            "{src}: {} points, depth {:?}, certified {}",
            set.len(),
            depth.depth,
            depth.certified
        );
        for p in set.points.iter().take(6) {
            println!(
                "    {:?} at ({:+.4}, {:+.4})",
                p.kind, p.position[0], p.position[1]
            );
        }
        if set.len() > 6 {
            println!("    ...");
        }
    }
    Ok(())
}
