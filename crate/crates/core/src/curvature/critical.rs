//! Critical point detection, Morse classification and the discrete
//! accumulation-depth surrogate.

use serde::{Serialize, Serializer};

use crate::field::{Jet2, ScalarField};
use crate::grid::NEIGHBORS8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Min,
    Max,
    Saddle,
    Degenerate,
}

impl CriticalKind {
    /// Classification from the Hessian; `Degenerate` iff `|det| <= tau_deg`.
    pub fn classify(jet: &Jet2, tau_deg: f64) -> CriticalKind {
        let det = jet.hess_det();
        if det.abs() <= tau_deg {
            CriticalKind::Degenerate
        } else if det < 0.0 {
            CriticalKind::Saddle
        } else if jet.hess_trace() > 0.0 {
            CriticalKind::Min
        } else {
            CriticalKind::Max
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub position: [f64; 2],
    /// Seed node the point was detected from.
    pub node: [usize; 2],
    pub kind: CriticalKind,
    pub hess_det: f64,
    pub grad_norm_at_detection: f64,
    /// Node jet transported to `position` (equal to the node jet when not refined).
    #[serde(skip)]
    pub jet: Jet2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalOptions {
    /// Absolute gradient threshold; `None` uses `tau_grad_factor * h * |D^2u|_local`.
    pub tau_grad: Option<f64>,
    pub tau_grad_factor: f64,
    /// `tau_deg = tau_deg_factor * (max |D^2u|)^2`.
    pub tau_deg_factor: f64,
    /// Detections closer than `cluster_factor * h_max` to an earlier one are merged.
    pub cluster_factor: f64,
    /// Newton steps longer than `max_step_factor * h_max` discard the seed.
    pub max_step_factor: f64,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions {
            tau_grad: None,
            tau_grad_factor: 10.0,
            tau_deg_factor: 1e-6,
            cluster_factor: 1.5,
            max_step_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalSet {
    pub points: Vec<CriticalPoint>,
    pub tau_deg: f64,
    pub h_max: f64,
}

impl CriticalSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Default clustering distance for [`accumulation_depth`]: `3 h_max`.
    pub fn default_delta_cluster(&self) -> f64 {
        3.0 * self.h_max
    }

    pub fn depth(&self) -> DepthReport {
        accumulation_depth(&self.points, self.default_delta_cluster())
    }
}

pub fn find_critical_points(field: &ScalarField, opts: &CriticalOptions) -> CriticalSet {
    let g = *field.grid();
    let mask = field.mask();
    let jets = field.jets();
    let h_max = g.h_max();
    let hess_max = jets
        .iter()
        .flatten()
        .map(Jet2::hess_max_abs)
        .fold(0.0, f64::max);
    let tau_deg = opts.tau_deg_factor * hess_max * hess_max;

    let neighbours = |i: usize, j: usize| {
        NEIGHBORS8
            .iter()
            .map(move |&(di, dj)| g.idx((i as isize + di) as usize, (j as isize + dj) as usize))
    };

    let mut points: Vec<CriticalPoint> = Vec::new();
    for (i, j) in mask.interior_nodes() {
        let jet = jets[g.idx(i, j)].expect("interior jet");
        let gn = jet.grad_norm();
        let tau = opts.tau_grad.unwrap_or_else(|| {
            let local = neighbours(i, j)
                .filter_map(|n| jets[n].map(|jt| jt.hess_norm()))
                .fold(jet.hess_norm(), f64::max);
            opts.tau_grad_factor * h_max * local
        });
        if !(gn < tau) {
            continue;
        }
        let is_local_min =
            neighbours(i, j).all(|n| jets[n].map_or(true, |jt| gn <= jt.grad_norm()));
        if !is_local_min {
            continue;
        }

        let (x, y) = g.point(i, j);
        let det = jet.hess_det();
        let (position, at) = if det.abs() > tau_deg {
            let [a, b, c] = jet.d2u;
            let [p, q] = jet.du;
            let dx = -(c * p - b * q) / det;
            let dy = -(a * q - b * p) / det;
            if dx.hypot(dy) > opts.max_step_factor * h_max {
                continue;
            }
            ([x + dx, y + dy], jet.shifted(dx, dy))
        } else {
            ([x, y], jet)
        };
        let radius = opts.cluster_factor * h_max;
        if points
            .iter()
            .any(|p| (p.position[0] - position[0]).hypot(p.position[1] - position[1]) < radius)
        {
            continue;
        }
        points.push(CriticalPoint {
            position,
            node: [i, j],
            kind: CriticalKind::classify(&jet, tau_deg),
            hess_det: det,
            grad_norm_at_detection: gn,
            jet: at,
        });
    }
    CriticalSet {
        points,
        tau_deg,
        h_max,
    }
}

/// Smallest `n` with an empty `n`-th derived set, as far as a grid can tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccumulationDepth {
    Finite(usize),
    Unbounded,
}

impl Serialize for AccumulationDepth {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            AccumulationDepth::Finite(n) => s.serialize_u64(*n as u64),
            AccumulationDepth::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DepthReport {
    pub depth: AccumulationDepth,
    pub components: usize,
    pub max_component_diameter: f64,
    pub delta_cluster: f64,
    /// Depth is finite, so the finite-depth hypothesis on critical sets holds.
    pub certified: bool,
}

/// Groups points into `delta_cluster`-connected components. An empty set has
/// depth 0; if every component has diameter `<= delta_cluster` the set is
/// treated as finite (depth 1); otherwise the points resolve a continuum and the
/// depth is reported unbounded.
pub fn accumulation_depth(points: &[CriticalPoint], delta_cluster: f64) -> DepthReport {
    let n = points.len();
    let dist = |a: usize, b: usize| {
        let (p, q) = (points[a].position, points[b].position);
        (p[0] - q[0]).hypot(p[1] - q[1])
    };
    let mut comp = vec![usize::MAX; n];
    let mut components = 0;
    let mut max_diam: f64 = 0.0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut members = vec![s];
        comp[s] = components;
        let mut k = 0;
        while k < members.len() {
            let a = members[k];
            for b in 0..n {
                if comp[b] == usize::MAX && dist(a, b) <= delta_cluster {
                    comp[b] = components;
                    members.push(b);
                }
            }
            k += 1;
        }
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                max_diam = max_diam.max(dist(a, b));
            }
        }
        components += 1;
    }
    let depth = if n == 0 {
        AccumulationDepth::Finite(0)
    } else if max_diam <= delta_cluster {
        AccumulationDepth::Finite(1)
    } else {
        AccumulationDepth::Unbounded
    };
    DepthReport {
        depth,
        components,
        max_component_diameter: max_diam,
        delta_cluster,
        certified: depth != AccumulationDepth::Unbounded,
    }
}
