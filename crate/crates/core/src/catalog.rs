//! Reference surfaces: spacelike planes, helicoids, the Euclidean hemisphere and
//! rotationally symmetric solutions.
//!
//! For `u = u(r)` the equation integrates once to `r psi(u'(r)) = C` with
//! `psi(t) = t (1/sqrt(1 - t^2) - 1/sqrt(1 + t^2))`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Jet2, ScalarField};
use crate::grid::{DomainMask, NodeKind};
use crate::solver::phi;

/// Gradient cap shared with the solver default.
pub const DEFAULT_GRAD_CAP: f64 = 1.0 - 1e-4;

/// `psi(t) = t phi(t^2)` for `0 <= t < 1`.
pub fn psi(t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::domain(format!(
            "psi is defined on [0, 1), got t = {t}"
        )));
    }
    Ok(t * phi(t * t))
}

/// `psi'(t) = (1-t^2)^(-1/2) - (1+t^2)^(-1/2) + t^2 ((1-t^2)^(-3/2) + (1+t^2)^(-3/2))`.
pub fn psi_prime(t: f64) -> f64 {
    let (a, b) = (1.0 - t * t, 1.0 + t * t);
    phi(t * t) + t * t * (a.powf(-1.5) + b.powf(-1.5))
}

/// Checks `psi` is strictly increasing on an `n`-point grid of `[0, 1 - 1e-9]`.
pub fn psi_monotonicity_scan(n: usize) -> bool {
    let top = 1.0 - 1e-9;
    let mut prev = -1.0;
    for k in 0..=n {
        let t = top * k as f64 / n as f64;
        let v = t * phi(t * t);
        if !(v > prev) {
            return false;
        }
        prev = v;
    }
    true
}

fn psi_is_monotone() -> Result<()> {
    static SCAN: OnceLock<bool> = OnceLock::new();
    if *SCAN.get_or_init(|| psi_monotonicity_scan(200_000)) {
        Ok(())
    } else {
        Err(Error::domain("psi failed its monotonicity scan"))
    }
}

/// Solves `psi(t) = v` for `t` in `[0, 1)` to within `tol` by Newton steps kept
/// inside a shrinking bracket.
pub fn psi_inverse(v: f64, tol: f64) -> Result<f64> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::domain(format!(
            "psi_inverse needs a finite v >= 0, got {v}"
        )));
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    psi_is_monotone()?;
    let f = |t: f64| t * phi(t * t) - v;
    let mut lo = 0.0;
    let mut hi = 0.5;
    while f(hi) < 0.0 {
        lo = hi;
        hi = 0.5 * (1.0 + hi);
        if 1.0 - hi < 1e-15 {
            return Err(Error::domain(format!("psi_inverse({v}) is too close to 1")));
        }
    }
    let mut t = if v < 0.5 {
        v.cbrt().min(hi)
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..200 {
        let ft = f(t);
        if ft == 0.0 {
            return Ok(t);
        }
        if ft < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - ft / psi_prime(t);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - t).abs() <= tol || hi - lo <= tol {
            return Ok(next);
        }
        t = next;
    }
    Ok(t)
}

fn simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1)
            + simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1)
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    simpson(f, a, b, f(a), f(m), f(b), tol, 40)
}

/// A rotationally symmetric solution `u(r)` on `[r_min, r_max]`, tabulated with
/// exact slopes so that cubic Hermite interpolation is accurate to `tol`.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub c: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub u0: f64,
    pub tol: f64,
    r: Vec<f64>,
    t: Vec<f64>,
    dt: Vec<f64>,
    u: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialParams {
    pub c: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub u0: f64,
    pub tol: f64,
    pub table_size: usize,
}

pub fn radial_solution(
    c: f64,
    r_min: f64,
    r_max: f64,
    u0: f64,
    tol: f64,
) -> Result<RadialSolution> {
    radial_solution_capped(c, r_min, r_max, u0, tol, DEFAULT_GRAD_CAP)
}

/// As [`radial_solution`] with an explicit gradient cap. `c = 0` gives the
/// constant solution.
pub fn radial_solution_capped(
    c: f64,
    r_min: f64,
    r_max: f64,
    u0: f64,
    tol: f64,
    grad_cap: f64,
) -> Result<RadialSolution> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::domain(format!(
            "flux constant must be >= 0 (use u -> -u for negative flux), got {c}"
        )));
    }
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::domain(format!(
            "need 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    if !(tol > 0.0) || !u0.is_finite() {
        return Err(Error::domain("tolerance must be positive and u0 finite"));
    }
    if !(grad_cap > 0.0 && grad_cap < 1.0) {
        return Err(Error::domain("grad_cap must lie in (0, 1)"));
    }
    let root_tol = (tol * 1e-3).max(1e-15);
    let cap_flux = psi(grad_cap)?;
    if c / r_min > cap_flux {
        let min_r = c / cap_flux;
        return Err(Error::domain(format!(
            "radial solution leaves the spacelike range at r_min = {r_min}; the minimal admissible r_min is {min_r:.12}"
        )));
    }
    let slope = |r: f64| psi_inverse(c / r, root_tol).expect("flux within range");
    let dslope = |r: f64, t: f64| {
        if t == 0.0 {
            0.0
        } else {
            -(c / r) / (r * psi_prime(t))
        }
    };

    let mut n = 64;
    loop {
        let r: Vec<f64> = (0..=n)
            .map(|k| r_min + (r_max - r_min) * k as f64 / n as f64)
            .collect();
        let t: Vec<f64> = r.iter().map(|&x| slope(x)).collect();
        let dt: Vec<f64> = r.iter().zip(&t).map(|(&x, &s)| dslope(x, s)).collect();
        let mut u = vec![u0; n + 1];
        let piece_tol = 0.1 * tol / n as f64;
        for k in 0..n {
            u[k + 1] = u[k] + adaptive_simpson(&slope, r[k], r[k + 1], piece_tol);
        }
        let sol = RadialSolution {
            c,
            r_min,
            r_max,
            u0,
            tol,
            r,
            t,
            dt,
            u,
        };
        // midpoint check of the Hermite interpolant against direct quadrature
        let worst = (0..n)
            .step_by((n / 32).max(1))
            .map(|k| {
                let m = 0.5 * (sol.r[k] + sol.r[k + 1]);
                let direct = sol.u[k] + adaptive_simpson(&slope, sol.r[k], m, piece_tol);
                (sol.u_at(m) - direct)
                    .abs()
                    .max((sol.t_at(m) - slope(m)).abs())
            })
            .fold(0.0, f64::max);
        if worst <= 0.5 * tol || n >= 1 << 16 {
            return Ok(sol);
        }
        n *= 2;
    }
}

impl RadialSolution {
    pub fn params(&self) -> RadialParams {
        RadialParams {
            c: self.c,
            r_min: self.r_min,
            r_max: self.r_max,
            u0: self.u0,
            tol: self.tol,
            table_size: self.r.len(),
        }
    }

    fn locate(&self, r: f64) -> (usize, f64, f64) {
        let n = self.r.len() - 1;
        let h = (self.r_max - self.r_min) / n as f64;
        let k = (((r - self.r_min) / h).floor().max(0.0) as usize).min(n - 1);
        (k, (r - self.r[k]) / h, h)
    }

    fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, s: f64, h: f64) -> (f64, f64) {
        let (s2, s3) = (s * s, s * s * s);
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * d1;
        let dv = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * h * d0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * h * d1)
            / h;
        (v, dv)
    }

    /// `u(r)`, clamped to the tabulated range.
    pub fn u_at(&self, r: f64) -> f64 {
        let (k, s, h) = self.locate(r);
        Self::hermite(self.u[k], self.u[k + 1], self.t[k], self.t[k + 1], s, h).0
    }

    /// `u'(r) = t(r)`.
    pub fn t_at(&self, r: f64) -> f64 {
        let (k, s, h) = self.locate(r);
        Self::hermite(self.t[k], self.t[k + 1], self.dt[k], self.dt[k + 1], s, h).0
    }

    /// `t'(r) = -psi(t) / (r psi'(t))`.
    pub fn dt_at(&self, r: f64) -> f64 {
        let (k, s, h) = self.locate(r);
        Self::hermite(self.t[k], self.t[k + 1], self.dt[k], self.dt[k + 1], s, h).1
    }

    /// Exact 2-jet of `u(|p - centre|)` at `(x, y)`.
    pub fn jet(&self, x: f64, y: f64) -> Jet2 {
        let r = x.hypot(y);
        let (t, dt) = (self.t_at(r), self.dt_at(r));
        let (cx, sy) = (x / r, y / r);
        Jet2::new(
            self.u_at(r),
            [t * cx, t * sy],
            [
                dt * cx * cx + t * sy * sy / r,
                (dt - t / r) * cx * sy,
                dt * sy * sy + t * cx * cx / r,
            ],
        )
    }

    /// `H_L = (1/(2r)) d/dr (r t / sqrt(1 - t^2))`.
    pub fn mean_curvature_l(&self, r: f64) -> f64 {
        let (t, dt) = (self.t_at(r), self.dt_at(r));
        let w = 1.0 - t * t;
        (t / w.sqrt() + r * dt / (w * w.sqrt())) / (2.0 * r)
    }

    /// `H_R = (1/(2r)) d/dr (r t / sqrt(1 + t^2))`.
    pub fn mean_curvature_r(&self, r: f64) -> f64 {
        let (t, dt) = (self.t_at(r), self.dt_at(r));
        let w = 1.0 + t * t;
        (t / w.sqrt() + r * dt / (w * w.sqrt())) / (2.0 * r)
    }

    /// Samples `u(|p - (cx, cy)|)` on a mask; every active node must lie in the
    /// tabulated radial range.
    pub fn field(&self, mask: &DomainMask, cx: f64, cy: f64) -> Result<ScalarField> {
        let g = *mask.grid();
        let slack = 1e-12 * self.r_max;
        for (k, kind) in mask.kinds().iter().enumerate() {
            if *kind == NodeKind::Exterior {
                continue;
            }
            let (i, j) = g.ij(k);
            let (x, y) = g.point(i, j);
            let r = (x - cx).hypot(y - cy);
            if r < self.r_min - slack || r > self.r_max + slack {
                return Err(Error::domain(format!(
                    "node ({x:.4}, {y:.4}) at radius {r:.6} is outside [{}, {}]",
                    self.r_min, self.r_max
                )));
            }
        }
        ScalarField::from_fn(mask.clone(), |x, y| self.u_at((x - cx).hypot(y - cy)))
    }
}

fn active_points(mask: &DomainMask) -> impl Iterator<Item = (f64, f64)> + '_ {
    let g = *mask.grid();
    mask.kinds()
        .iter()
        .enumerate()
        .filter(|(_, k)| **k != NodeKind::Exterior)
        .map(move |(k, _)| {
            let (i, j) = g.ij(k);
            g.point(i, j)
        })
}

/// `u = a x + b y + c`; spacelike needs `a^2 + b^2 < 1`.
pub fn plane_field(a: f64, b: f64, c: f64, mask: &DomainMask) -> Result<ScalarField> {
    if !(a.hypot(b) < DEFAULT_GRAD_CAP) {
        return Err(Error::domain(format!(
            "plane slope {} is not spacelike",
            a.hypot(b)
        )));
    }
    ScalarField::from_fn(mask.clone(), |x, y| a * x + b * y + c)
}

/// `u = a atan2(y, x)`. The mask must keep `r > |a| / grad_cap` and must not
/// straddle the branch cut along the negative x-axis.
pub fn helicoid_field(a: f64, mask: &DomainMask) -> Result<ScalarField> {
    if !a.is_finite() {
        return Err(Error::domain("helicoid pitch must be finite"));
    }
    let r_limit = a.abs() / DEFAULT_GRAD_CAP;
    if let Some((x, y)) = active_points(mask).find(|&(x, y)| x.hypot(y) <= r_limit) {
        return Err(Error::domain(format!(
            "helicoid is not spacelike at ({x:.4}, {y:.4}); the mask must stay outside r = {r_limit:.6}"
        )));
    }
    let g = *mask.grid();
    let kinds = mask.kinds();
    for j in 0..g.ny {
        for i in 0..g.nx {
            if kinds[g.idx(i, j)] == NodeKind::Exterior {
                continue;
            }
            for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                if ni < g.nx && nj < g.ny && kinds[g.idx(ni, nj)] != NodeKind::Exterior {
                    let (x0, y0) = g.point(i, j);
                    let (x1, y1) = g.point(ni, nj);
                    if (y0.atan2(x0) - y1.atan2(x1)).abs() > std::f64::consts::PI {
                        return Err(Error::domain(format!(
                            "mask crosses the helicoid branch cut near ({x0:.4}, {y0:.4})"
                        )));
                    }
                }
            }
        }
    }
    ScalarField::from_fn(mask.clone(), |x, y| a * y.atan2(x))
}

/// Upper Euclidean hemisphere `u = sqrt(R^2 - x^2 - y^2)` (mean curvature `-1/R`
/// with the upward normal). Not spacelike near its rim; used for the Euclidean
/// radius bound only.
pub fn hemisphere_field(radius: f64, mask: &DomainMask) -> Result<ScalarField> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain("hemisphere radius must be positive"));
    }
    if let Some((x, y)) = active_points(mask).find(|&(x, y)| x.hypot(y) >= radius) {
        return Err(Error::domain(format!(
            "node ({x:.4}, {y:.4}) is outside the open disc of radius {radius}"
        )));
    }
    ScalarField::from_fn(mask.clone(), |x, y| {
        (radius * radius - x * x - y * y).sqrt()
    })
}

/// A reference surface by name, as used in manifests and solve requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogSpec {
    Plane {
        a: f64,
        b: f64,
        #[serde(default)]
        c: f64,
    },
    Helicoid {
        a: f64,
    },
    Hemisphere {
        radius: f64,
    },
    Radial {
        c: f64,
        r_min: f64,
        r_max: f64,
        #[serde(default)]
        u0: f64,
        #[serde(default = "default_radial_tol")]
        tol: f64,
    },
}

fn default_radial_tol() -> f64 {
    1e-12
}

impl CatalogSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CatalogSpec::Plane { .. } => "plane",
            CatalogSpec::Helicoid { .. } => "helicoid",
            CatalogSpec::Hemisphere { .. } => "hemisphere",
            CatalogSpec::Radial { .. } => "radial",
        }
    }

    /// The domain each surface is usually sampled on, with `n` nodes per side.
    pub fn default_mask(&self, n: usize) -> Result<DomainMask> {
        match *self {
            CatalogSpec::Plane { .. } => Ok(DomainMask::rectangle(crate::grid::Grid2::square(
                -1.0, 1.0, n,
            )?)),
            CatalogSpec::Helicoid { a } => {
                let r_in = (2.0 * a.abs()).max(1e-3);
                DomainMask::slit_annulus(0.0, 0.0, r_in, 3.0 * r_in, n)
            }
            CatalogSpec::Hemisphere { radius } => DomainMask::disc(0.0, 0.0, 0.75 * radius, n),
            CatalogSpec::Radial { r_min, r_max, .. } => {
                DomainMask::annulus(0.0, 0.0, r_min, r_max, n)
            }
        }
    }

    pub fn sample(&self, mask: &DomainMask) -> Result<ScalarField> {
        match *self {
            CatalogSpec::Plane { a, b, c } => plane_field(a, b, c, mask),
            CatalogSpec::Helicoid { a } => helicoid_field(a, mask),
            CatalogSpec::Hemisphere { radius } => hemisphere_field(radius, mask),
            CatalogSpec::Radial {
                c,
                r_min,
                r_max,
                u0,
                tol,
            } => radial_solution(c, r_min, r_max, u0, tol)?.field(mask, 0.0, 0.0),
        }
    }

    /// Whether the sampled surface is (up to discretization) a solution of the
    /// `H_R = H_L` equation.
    pub fn is_solution(&self) -> bool {
        !matches!(self, CatalogSpec::Hemisphere { .. })
    }
}
