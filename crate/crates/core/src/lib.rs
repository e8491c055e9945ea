//! Spacelike graphs `z = u(x, y)` in Lorentz-Minkowski 3-space whose Euclidean and
//! Lorentzian mean curvatures agree.
//!
//! Such graphs solve the degenerate quasilinear equation
//!
//! ```text
//! div( (1/sqrt(1 - |Du|^2) - 1/sqrt(1 + |Du|^2)) Du ) = 0,   |Du| < 1,
//! ```
//!
//! which loses ellipticity wherever `Du = 0`. The crate provides:
//!
//! * [`grid`], [`field`], [`fieldio`]: masked rectangular grids, sampled fields,
//!   second-order finite-difference jets and the text field format.
//! * [`curvature`]: `H_R`, `H_L`, both Gaussian curvatures, critical point detection
//!   and Morse classification.
//! * [`levelset`]: marching-squares level curves and the signed level-curve
//!   curvature, plus the `|H_L| <= |k|/(2 sqrt 2)` audit.
//! * [`solver`]: a damped Picard Dirichlet solver with regularization continuation.
//! * [`catalog`]: planes, helicoids, hemispheres and radial solutions.
//! * [`verifier`]: inradius and the critical-point / inradius bound checks.
//! * [`expr`]: the expression language used for boundary data and test fields.

pub mod catalog;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod field;
pub mod fieldio;
pub mod grid;
pub mod levelset;
pub mod request;
pub mod solver;
pub mod stencil;
pub mod verifier;

pub use error::{Error, Result};
pub use field::{Jet2, ScalarField, DEFAULT_DELTA_SPACE};
pub use grid::{DomainMask, Grid2, NodeKind};

/// `1 / (2 sqrt 2)`, the constant relating `|H_L|` to level-curve curvature.
pub const INV_TWO_SQRT_TWO: f64 = std::f64::consts::FRAC_1_SQRT_2 / 2.0;
