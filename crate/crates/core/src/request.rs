//! JSON descriptions of masks, boundary data and solve requests, shared by the
//! command line and verification manifests.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::CatalogSpec;
use crate::error::{Error, Result};
use crate::expr;
use crate::field::ScalarField;
use crate::fieldio;
use crate::grid::{DomainMask, Grid2};
use crate::solver::{BoundaryValues, SolveConfig};

fn default_n() -> usize {
    129
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaskSpec {
    Rectangle {
        x_lo: f64,
        x_hi: f64,
        y_lo: f64,
        y_hi: f64,
        #[serde(default = "default_n")]
        nx: usize,
        #[serde(default = "default_n")]
        ny: usize,
    },
    Disc {
        #[serde(default)]
        cx: f64,
        #[serde(default)]
        cy: f64,
        r: f64,
        #[serde(default = "default_n")]
        n: usize,
    },
    Annulus {
        #[serde(default)]
        cx: f64,
        #[serde(default)]
        cy: f64,
        r_in: f64,
        r_out: f64,
        #[serde(default = "default_n")]
        n: usize,
    },
    SlitAnnulus {
        #[serde(default)]
        cx: f64,
        #[serde(default)]
        cy: f64,
        r_in: f64,
        r_out: f64,
        #[serde(default = "default_n")]
        n: usize,
    },
    /// Mask of an existing field file; relative paths resolve against the
    /// directory of the file that mentions them.
    File { path: PathBuf },
}

impl MaskSpec {
    pub fn build(&self, base_dir: &Path) -> Result<DomainMask> {
        match self {
            MaskSpec::Rectangle {
                x_lo,
                x_hi,
                y_lo,
                y_hi,
                nx,
                ny,
            } => Ok(DomainMask::rectangle(Grid2::spanning(
                *x_lo, *x_hi, *y_lo, *y_hi, *nx, *ny,
            )?)),
            MaskSpec::Disc { cx, cy, r, n } => DomainMask::disc(*cx, *cy, *r, *n),
            MaskSpec::Annulus {
                cx,
                cy,
                r_in,
                r_out,
                n,
            } => DomainMask::annulus(*cx, *cy, *r_in, *r_out, *n),
            MaskSpec::SlitAnnulus {
                cx,
                cy,
                r_in,
                r_out,
                n,
            } => DomainMask::slit_annulus(*cx, *cy, *r_in, *r_out, *n),
            MaskSpec::File { path } => {
                Ok(fieldio::read_field(&base_dir.join(path))?.mask().clone())
            }
        }
    }
}

/// Dirichlet data: an expression in `x, y`, or a catalog surface sampled on the
/// boundary nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    Expr(String),
    Catalog(CatalogSpec),
}

impl BoundarySpec {
    /// The boundary data and, for catalog data, the full reference field.
    pub fn build(&self, mask: &DomainMask) -> Result<(BoundaryValues, Option<ScalarField>)> {
        match self {
            BoundarySpec::Expr(src) => {
                let e = expr::parse(src)?;
                let f = e.sample(mask)?;
                Ok((BoundaryValues::from_field(&f), None))
            }
            BoundarySpec::Catalog(spec) => {
                let f = spec.sample(mask)?;
                Ok((BoundaryValues::from_field(&f), Some(f)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRequest {
    pub mask: MaskSpec,
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub config: SolveConfig,
    /// Optional initial guess, an expression in `x, y`.
    #[serde(default)]
    pub init: Option<String>,
}

impl SolveRequest {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Builds the mask, boundary data, optional reference field and optional
    /// initial guess.
    pub fn materialize(&self, base_dir: &Path) -> Result<Materialized> {
        let mask = self.mask.build(base_dir)?;
        let (boundary, reference) = self.boundary.build(&mask)?;
        let init = match &self.init {
            Some(src) => Some(expr::parse(src)?.sample(&mask)?),
            None => None,
        };
        if init
            .as_ref()
            .is_some_and(|f| !f.is_spacelike(crate::DEFAULT_DELTA_SPACE))
        {
            return Err(Error::domain("initial guess is not spacelike"));
        }
        Ok(Materialized {
            mask,
            boundary,
            reference,
            init,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Materialized {
    pub mask: DomainMask,
    pub boundary: BoundaryValues,
    pub reference: Option<ScalarField>,
    pub init: Option<ScalarField>,
}
