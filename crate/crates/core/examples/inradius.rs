//! Exact Euclidean distance transform and inradius of grid masks.
//!
//! cargo run --example inradius

use spacelike_graphs::verifier::{distance_transform, inradius};
use spacelike_graphs::{DomainMask, Grid2, Result};

fn main() -> Result<()> {
    let masks = [
        (
            "square [-1,1]^2",
            DomainMask::rectangle(Grid2::square(-1.0, 1.0, 129)?),
            1.0,
        ),
        ("disc r = 1.5", DomainMask::disc(0.0, 0.0, 1.5, 129)?, 1.5),
        (
            "annulus [1,3]",
            DomainMask::annulus(0.0, 0.0, 1.0, 3.0, 129)?,
            1.0,
        ),
        (
            "slit annulus [1,3]",
            DomainMask::slit_annulus(0.0, 0.0, 1.0, 3.0, 129)?,
            1.0,
        ),
    ];
    for (name, mask, exact) in &masks {
        let r = inradius(mask)?;
        let h = mask.grid().h_max();
        println!(
            "{name:<20} inradius {r:.6}  continuum {exact:.6}  diff {:.2} h",
            (exact - r) / h
        );
    }

    let mask = DomainMask::rectangle(Grid2::square(0.0, 1.0, 9)?);
    let d = distance_transform(&mask);
    for j in (0..9).rev() {
        let row: Vec<String> = (0..9)
            .map(|i| format!("{:.3}", d[mask.grid().idx(i, j)]))
            .collect();
        println!("{}", row.join(" "));
    }
    Ok(())
}
