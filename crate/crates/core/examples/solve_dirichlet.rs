//! Dirichlet solve on an annulus with radial boundary data, compared to the ODE solution.
//!
//! cargo run --release --example solve_dirichlet

use spacelike_graphs::catalog::radial_solution;
use spacelike_graphs::solver::{solve_dirichlet, BoundaryValues, SolveConfig};
use spacelike_graphs::{DomainMask, Result};

fn main() -> Result<()> {
    let sol = radial_solution(0.5, 1.0, 3.0, 0.0, 1e-12)?;
    let cfg = SolveConfig::default();
    let mut prev: Option<f64> = None;
    for n in [65, 129, 257] {
        let mask = DomainMask::annulus(0.0, 0.0, 1.0, 3.0, n)?;
        let exact = sol.field(&mask, 0.0, 0.0)?;
        let g = BoundaryValues::from_field(&exact);
        let (u, rep) = solve_dirichlet(&mask, &g, &cfg, None)?;
        let err = u.sup_distance(&exact)?;
        let order = prev
            .map(|p| format!("{:.2}", (p / err).log2()))
            .unwrap_or_default();
        println!(
            "n = {n:>3}: converged {} in {} outer steps, residual {:.2e}, max error {err:.3e} {order}",
            rep.converged, rep.outer_iterations, rep.final_residual
        );
        for s in &rep.eps_path {
            println!("    eps {:.0e}: {} steps", s.eps, s.iterations);
        }
        prev = Some(err);
    }
    Ok(())
}
