//! Multi-start agreement test for the Dirichlet solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{harmonic_extension, solve_dirichlet, BoundaryValues, SolveConfig};
use crate::curvature::mean_curvature_r;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::DomainMask;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub n_starts: usize,
    pub seed: u64,
    /// Bump amplitude as a fraction of the boundary oscillation.
    pub amplitude: f64,
    pub bumps_per_start: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            n_starts: 3,
            seed: 0x5eed,
            amplitude: 0.2,
            bumps_per_start: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StartOutcome {
    pub start: usize,
    pub converged: bool,
    pub outer_iterations: usize,
    pub final_residual: f64,
    pub min_abs_h_r: f64,
    pub max_abs_h_r: f64,
    /// `H_R` takes both signs over the interior.
    pub h_r_changes_sign: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub starts: Vec<StartOutcome>,
    /// Max pairwise sup-distance over converged starts (`None` if fewer than two converged).
    pub max_pairwise_distance: Option<f64>,
    /// Below this level `|H_R|` is indistinguishable from zero.
    pub h_r_floor: f64,
    /// Every converged start has `min |H_R| > h_r_floor` and no sign change.
    pub h_r_bounded_away: bool,
    #[serde(skip)]
    pub fields: Vec<ScalarField>,
}

/// Smooth interior perturbations of the harmonic extension: sums of Gaussian
/// bumps, tapered to vanish on the boundary.
fn perturbed_starts(
    base: &ScalarField,
    g: &BoundaryValues,
    cfg: &ProbeConfig,
) -> Result<Vec<ScalarField>> {
    let mask = base.mask();
    let grid = *mask.grid();
    let (lo, hi) = g.range();
    let amp = cfg.amplitude * (hi - lo);
    let interior: Vec<(usize, usize)> = mask.interior_nodes().collect();
    let taper_layers = 4;
    let layers: Vec<Vec<bool>> = (1..=taper_layers).map(|l| mask.deep_interior(l)).collect();
    let taper = |k: usize| {
        let depth = 1 + layers.iter().take_while(|d| d[k]).count();
        depth as f64 / (taper_layers + 1) as f64
    };
    let extent = (grid.nx as f64 * grid.hx).max(grid.ny as f64 * grid.hy);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = vec![base.clone()];
    for _ in 1..cfg.n_starts {
        let mut v = base.values().to_vec();
        if amp > 0.0 && !interior.is_empty() {
            let bumps: Vec<(f64, f64, f64, f64)> = (0..cfg.bumps_per_start)
                .map(|_| {
                    let (ci, cj) = interior[rng.gen_range(0..interior.len())];
                    let (cx, cy) = grid.point(ci, cj);
                    let a = rng.gen_range(-1.0..=1.0) / cfg.bumps_per_start as f64;
                    let w = extent * rng.gen_range(0.08..0.2);
                    (cx, cy, a, w)
                })
                .collect();
            for &(i, j) in &interior {
                let (x, y) = grid.point(i, j);
                let k = grid.idx(i, j);
                let s: f64 = bumps
                    .iter()
                    .map(|&(cx, cy, a, w)| {
                        a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (w * w)).exp()
                    })
                    .sum();
                v[k] += amp * taper(k) * s;
            }
        }
        starts.push(ScalarField::new(mask.clone(), v)?);
    }
    Ok(starts)
}

pub fn uniqueness_probe(
    mask: &DomainMask,
    g: &BoundaryValues,
    cfg: &SolveConfig,
    probe: &ProbeConfig,
) -> Result<ProbeReport> {
    if probe.n_starts == 0 {
        return Err(Error::domain("probe needs at least one start"));
    }
    if !(0.0..=0.2).contains(&probe.amplitude) {
        return Err(Error::domain("probe amplitude must lie in [0, 0.2]"));
    }
    let base = harmonic_extension(g)?;
    let inits = perturbed_starts(&base, g, probe)?;

    let h = mask.grid().h_max();
    let h_r_floor = 10.0 * cfg.tol_residual + h * h;
    let mut starts = Vec::new();
    let mut fields = Vec::new();
    for (n, init) in inits.iter().enumerate() {
        let (u, rep) = solve_dirichlet(mask, g, cfg, Some(init))?;
        let hr: Vec<f64> = u.jets().iter().flatten().map(mean_curvature_r).collect();
        let min_abs = hr.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let max_abs = hr.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let pos = hr.iter().any(|&v| v > h_r_floor);
        let neg = hr.iter().any(|&v| v < -h_r_floor);
        starts.push(StartOutcome {
            start: n,
            converged: rep.converged,
            outer_iterations: rep.outer_iterations,
            final_residual: rep.final_residual,
            min_abs_h_r: min_abs,
            max_abs_h_r: max_abs,
            h_r_changes_sign: pos && neg,
        });
        fields.push(u);
    }

    let ok: Vec<usize> = starts
        .iter()
        .filter(|s| s.converged)
        .map(|s| s.start)
        .collect();
    let mut max_pairwise_distance = None;
    for (a, &p) in ok.iter().enumerate() {
        for &q in &ok[a + 1..] {
            let d = fields[p].sup_distance(&fields[q])?;
            max_pairwise_distance = Some(max_pairwise_distance.map_or(d, |m: f64| m.max(d)));
        }
    }
    let h_r_bounded_away = !ok.is_empty()
        && ok
            .iter()
            .all(|&p| starts[p].min_abs_h_r > h_r_floor && !starts[p].h_r_changes_sign);
    Ok(ProbeReport {
        starts,
        max_pairwise_distance,
        h_r_floor,
        h_r_bounded_away,
        fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_data_starts_agree_exactly() {
        let mask = DomainMask::disc(0.0, 0.0, 1.0, 25).unwrap();
        let g = BoundaryValues::from_fn(&mask, |_, _| -2.5).unwrap();
        let rep =
            uniqueness_probe(&mask, &g, &SolveConfig::default(), &ProbeConfig::default()).unwrap();
        assert_eq!(rep.starts.len(), 3);
        assert_eq!(rep.max_pairwise_distance, Some(0.0));
        assert!(!rep.h_r_bounded_away);
    }

    #[test]
    fn starts_are_reproducible() {
        let mask = DomainMask::disc(0.0, 0.0, 1.0, 25).unwrap();
        let g = BoundaryValues::from_fn(&mask, |x, y| 0.2 * x * y).unwrap();
        let base = harmonic_extension(&g).unwrap();
        let a = perturbed_starts(&base, &g, &ProbeConfig::default()).unwrap();
        let b = perturbed_starts(&base, &g, &ProbeConfig::default()).unwrap();
        assert_eq!(a.len(), 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.values(), y.values());
        }
        assert!(a[1].sup_distance(&a[0]).unwrap() > 0.0);
        for (i, j) in mask.boundary_nodes() {
            assert_eq!(a[2].at(i, j), base.at(i, j));
        }
    }
}
