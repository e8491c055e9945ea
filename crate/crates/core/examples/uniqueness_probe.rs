//! Solves the same problem from several perturbed starts and compares the results.
//!
//! cargo run --release --example uniqueness_probe

use spacelike_graphs::catalog::radial_solution;
use spacelike_graphs::solver::{uniqueness_probe, BoundaryValues, ProbeConfig, SolveConfig};
use spacelike_graphs::{DomainMask, Result};

fn main() -> Result<()> {
    let mask = DomainMask::annulus(0.0, 0.0, 1.0, 3.0, 65)?;
    let exact = radial_solution(0.5, 1.0, 3.0, 0.0, 1e-12)?.field(&mask, 0.0, 0.0)?;
    let g = BoundaryValues::from_field(&exact);
    let report = uniqueness_probe(&mask, &g, &SolveConfig::default(), &ProbeConfig::default())?;
    for s in &report.starts {
        println!(
            "start {}: converged {} ({} steps), residual {:.2e}, |H_R| in [{:.4}, {:.4}]",
            s.start,
            s.converged,
            s.outer_iterations,
            s.final_residual,
            s.min_abs_h_r,
            s.max_abs_h_r
        );
    }
    println!(
        "max pairwise sup-distance: {:.3e}",
        report.max_pairwise_distance.unwrap_or(f64::NAN)
    );
    println!(
        "H_R bounded away from {:.1e}: {}",
        report.h_r_floor, report.h_r_bounded_away
    );
    Ok(())
}
