//! Rectangular node grids and node-based domain masks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform rectangular grid of `nx * ny` nodes, node `(i, j)` at
/// `(x0 + i*hx, y0 + j*hy)`. Storage everywhere is row-major with `i` fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Grid2 {
    pub fn new(nx: usize, ny: usize, hx: f64, hy: f64, x0: f64, y0: f64) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::domain(format!(
                "grid needs nx, ny >= 3 (got {nx} x {ny})"
            )));
        }
        if !(hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite()) {
            return Err(Error::domain(format!(
                "grid spacing must be positive (got {hx}, {hy})"
            )));
        }
        if !(x0.is_finite() && y0.is_finite()) {
            return Err(Error::domain("grid origin must be finite"));
        }
        Ok(Grid2 {
            nx,
            ny,
            hx,
            hy,
            x0,
            y0,
        })
    }

    /// Grid with `nx * ny` nodes spanning `[x_lo, x_hi] x [y_lo, y_hi]`.
    pub fn spanning(
        x_lo: f64,
        x_hi: f64,
        y_lo: f64,
        y_hi: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        if nx < 2 || ny < 2 || !(x_hi > x_lo) || !(y_hi > y_lo) {
            return Err(Error::domain("degenerate grid extent"));
        }
        let hx = (x_hi - x_lo) / (nx - 1) as f64;
        let hy = (y_hi - y_lo) / (ny - 1) as f64;
        Grid2::new(nx, ny, hx, hy, x_lo, y_lo)
    }

    /// Square grid with `n` nodes per side on `[lo, hi]^2`.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Grid2::spanning(lo, hi, lo, hi, n, n)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x(i), self.y(j))
    }

    pub fn h_max(&self) -> f64 {
        self.hx.max(self.hy)
    }

    pub fn h_min(&self) -> f64 {
        self.hx.min(self.hy)
    }

    /// Node nearest to `(x, y)`, clamped to the grid.
    pub fn nearest(&self, x: f64, y: f64) -> (usize, usize) {
        let fi = ((x - self.x0) / self.hx).round();
        let fj = ((y - self.y0) / self.hy).round();
        let i = fi.clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = fj.clamp(0.0, (self.ny - 1) as f64) as usize;
        (i, j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Interior,
    Boundary,
    Exterior,
}

/// Node classification of a grid. Interior nodes have all eight neighbours inside
/// the domain; boundary nodes are domain nodes touching the exterior or the grid
/// edge. Constructors reject masks whose interior is not 4-connected.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMask {
    grid: Grid2,
    kinds: Vec<NodeKind>,
}

pub(crate) const NEIGHBORS8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

impl DomainMask {
    /// Classifies nodes from a per-node "in the domain" flag.
    pub fn from_active(grid: Grid2, active: &[bool]) -> Result<Self> {
        if active.len() != grid.len() {
            return Err(Error::domain(format!(
                "mask has {} entries, grid has {} nodes",
                active.len(),
                grid.len()
            )));
        }
        let mut kinds = vec![NodeKind::Exterior; grid.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let k = grid.idx(i, j);
                if !active[k] {
                    continue;
                }
                let on_edge = i == 0 || j == 0 || i + 1 == grid.nx || j + 1 == grid.ny;
                let touches_exterior = !on_edge
                    && NEIGHBORS8.iter().any(|&(di, dj)| {
                        let n = grid.idx((i as isize + di) as usize, (j as isize + dj) as usize);
                        !active[n]
                    });
                kinds[k] = if on_edge || touches_exterior {
                    NodeKind::Boundary
                } else {
                    NodeKind::Interior
                };
            }
        }
        let mask = DomainMask { grid, kinds };
        mask.check_connected()?;
        Ok(mask)
    }

    /// Domain = nodes whose coordinates satisfy `inside`.
    pub fn from_predicate(grid: Grid2, inside: impl Fn(f64, f64) -> bool) -> Result<Self> {
        let active: Vec<bool> = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.ij(k);
                inside(grid.x(i), grid.y(j))
            })
            .collect();
        DomainMask::from_active(grid, &active)
    }

    /// Every node of the grid.
    pub fn rectangle(grid: Grid2) -> Self {
        DomainMask::from_active(grid, &vec![true; grid.len()]).expect("full rectangle is connected")
    }

    /// Disc of radius `r` about `(cx, cy)` on an `n x n` grid spanning its bounding box.
    pub fn disc(cx: f64, cy: f64, r: f64, n: usize) -> Result<Self> {
        let grid = Grid2::spanning(cx - r, cx + r, cy - r, cy + r, n, n)?;
        let lim = r * (1.0 + 1e-12);
        DomainMask::from_predicate(grid, |x, y| (x - cx).hypot(y - cy) <= lim)
    }

    /// Annulus `r_in <= |p - c| <= r_out` on an `n x n` grid spanning the outer box.
    pub fn annulus(cx: f64, cy: f64, r_in: f64, r_out: f64, n: usize) -> Result<Self> {
        if !(r_in > 0.0 && r_out > r_in) {
            return Err(Error::domain("annulus needs 0 < r_in < r_out"));
        }
        let grid = Grid2::spanning(cx - r_out, cx + r_out, cy - r_out, cy + r_out, n, n)?;
        let (lo, hi) = (r_in * (1.0 - 1e-12), r_out * (1.0 + 1e-12));
        DomainMask::from_predicate(grid, |x, y| {
            let r = (x - cx).hypot(y - cy);
            r >= lo && r <= hi
        })
    }

    /// Annulus with the band `x < cx, |y - cy| < 1.5 hy` removed, so that a branch of
    /// `atan2` is single valued on the domain.
    pub fn slit_annulus(cx: f64, cy: f64, r_in: f64, r_out: f64, n: usize) -> Result<Self> {
        if !(r_in > 0.0 && r_out > r_in) {
            return Err(Error::domain("annulus needs 0 < r_in < r_out"));
        }
        let grid = Grid2::spanning(cx - r_out, cx + r_out, cy - r_out, cy + r_out, n, n)?;
        let (lo, hi) = (r_in * (1.0 - 1e-12), r_out * (1.0 + 1e-12));
        let band = 1.5 * grid.hy;
        DomainMask::from_predicate(grid, |x, y| {
            let r = (x - cx).hypot(y - cy);
            let in_slit = x < cx && (y - cy).abs() < band;
            r >= lo && r <= hi && !in_slit
        })
    }

    fn check_connected(&self) -> Result<()> {
        let g = &self.grid;
        let Some(start) = self.kinds.iter().position(|&k| k == NodeKind::Interior) else {
            return Ok(());
        };
        let total = self
            .kinds
            .iter()
            .filter(|&&k| k == NodeKind::Interior)
            .count();
        let mut seen = vec![false; g.len()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 0;
        while let Some(k) = stack.pop() {
            count += 1;
            let (i, j) = g.ij(k);
            for (di, dj) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
                let (ni, nj) = (i as isize + di, j as isize + dj);
                if ni < 0 || nj < 0 || ni >= g.nx as isize || nj >= g.ny as isize {
                    continue;
                }
                let n = g.idx(ni as usize, nj as usize);
                if !seen[n] && self.kinds[n] == NodeKind::Interior {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        if count != total {
            return Err(Error::domain(format!(
                "mask interior is not connected ({count} of {total} interior nodes reachable)"
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    #[inline]
    pub fn kind(&self, i: usize, j: usize) -> NodeKind {
        self.kinds[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        self.kind(i, j) == NodeKind::Interior
    }

    #[inline]
    pub fn is_active(&self, i: usize, j: usize) -> bool {
        self.kind(i, j) != NodeKind::Exterior
    }

    /// Interior nodes in row-major order.
    pub fn interior_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, &k)| k == NodeKind::Interior)
            .map(move |(k, _)| self.grid.ij(k))
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, &k)| k == NodeKind::Boundary)
            .map(move |(k, _)| self.grid.ij(k))
    }

    pub fn interior_count(&self) -> usize {
        self.kinds
            .iter()
            .filter(|&&k| k == NodeKind::Interior)
            .count()
    }

    /// Interior nodes whose whole `(2*layers+1)^2` neighbourhood is interior, i.e.
    /// at least `layers` hops away from any non-interior node. `layers = 0` is the
    /// plain interior.
    pub fn deep_interior(&self, layers: usize) -> Vec<bool> {
        let g = &self.grid;
        let mut deep: Vec<bool> = self
            .kinds
            .iter()
            .map(|&k| k == NodeKind::Interior)
            .collect();
        for _ in 0..layers {
            let prev = deep.clone();
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let k = g.idx(i, j);
                    if !prev[k] {
                        continue;
                    }
                    let all = NEIGHBORS8.iter().all(|&(di, dj)| {
                        let (ni, nj) = (i as isize + di, j as isize + dj);
                        ni >= 0
                            && nj >= 0
                            && ni < g.nx as isize
                            && nj < g.ny as isize
                            && prev[g.idx(ni as usize, nj as usize)]
                    });
                    deep[k] = all;
                }
            }
        }
        deep
    }

    /// True if every domain node of `self` is also a domain node of `other`
    /// (same grid required).
    pub fn is_subset_of(&self, other: &DomainMask) -> bool {
        self.grid == other.grid
            && self
                .kinds
                .iter()
                .zip(&other.kinds)
                .all(|(a, b)| *a == NodeKind::Exterior || *b != NodeKind::Exterior)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_grids() {
        assert!(Grid2::new(2, 5, 0.1, 0.1, 0.0, 0.0).is_err());
        assert!(Grid2::new(3, 3, 0.0, 0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn symmetric_square_has_node_at_origin() {
        let g = Grid2::square(-1.0, 1.0, 129).unwrap();
        assert_eq!(g.x(64), 0.0);
        assert_eq!(g.y(64), 0.0);
    }

    #[test]
    fn rectangle_classification() {
        let m = DomainMask::rectangle(Grid2::square(0.0, 1.0, 5).unwrap());
        assert_eq!(m.interior_count(), 9);
        assert_eq!(m.kind(0, 2), NodeKind::Boundary);
        assert_eq!(m.kind(2, 2), NodeKind::Interior);
    }

    #[test]
    fn interior_nodes_have_active_neighbours() {
        let m = DomainMask::annulus(0.0, 0.0, 1.0, 3.0, 41).unwrap();
        let g = *m.grid();
        for (i, j) in m.interior_nodes() {
            for (di, dj) in NEIGHBORS8 {
                assert!(m.is_active((i as isize + di) as usize, (j as isize + dj) as usize));
            }
        }
        assert!(m.kind(g.nx / 2, g.ny / 2) == NodeKind::Exterior);
    }

    #[test]
    fn disconnected_interior_is_rejected() {
        let g = Grid2::spanning(0.0, 2.0, 0.0, 1.0, 21, 11).unwrap();
        let r = DomainMask::from_predicate(g, |x, _| !(0.9..=1.1).contains(&x));
        assert!(r.is_err());
    }

    #[test]
    fn slit_annulus_is_connected_and_cut() {
        let m = DomainMask::slit_annulus(0.0, 0.0, 1.0, 3.0, 65).unwrap();
        let g = *m.grid();
        let (i, j) = g.nearest(-2.0, 0.0);
        assert_eq!(m.kind(i, j), NodeKind::Exterior);
        assert!(m.interior_count() > 0);
    }

    #[test]
    fn deep_interior_shrinks() {
        let m = DomainMask::rectangle(Grid2::square(0.0, 1.0, 11).unwrap());
        let d1 = m.deep_interior(1);
        assert_eq!(d1.iter().filter(|&&b| b).count(), 7 * 7);
        assert_eq!(m.deep_interior(0).iter().filter(|&&b| b).count(), 81);
    }
}
