//! The radial solutions: psi, its inverse, and the ODE profile r psi(u') = C.
//!
//! cargo run --example radial_profile

use spacelike_graphs::catalog::{psi, psi_inverse, radial_solution};
use spacelike_graphs::Result;

fn main() -> Result<()> {
    for t in [0.1, 0.3, 0.6, 0.9, 0.99] {
        let v = psi(t)?;
        println!(
            "psi({t}) = {v:.15}   psi^-1 round trip error {:.1e}",
            (psi_inverse(v, 1e-15)? - t).abs()
        );
    }

    let sol = radial_solution(0.5, 1.0, 3.0, 0.0, 1e-12)?;
    println!(
        "\n{:>6} {:>14} {:>12} {:>14} {:>14}",
        "r", "u(r)", "u'(r)", "H_R", "H_L"
    );
    for k in 0..=8 {
        let r = 1.0 + 0.25 * k as f64;
        println!(
            "{r:>6.2} {:>14.10} {:>12.8} {:>14.6e} {:>14.6e}",
            sol.u_at(r),
            sol.t_at(r),
            sol.mean_curvature_r(r),
            sol.mean_curvature_l(r)
        );
    }

    match radial_solution(0.5, 0.001, 3.0, 0.0, 1e-12) {
        Ok(_) => println!("\nunexpected: r_min = 0.001 accepted"),
        Err(e) => println!("\nr_min = 0.001: {e}"),
    }
    Ok(())
}
