//! Text field format.
//!
//! ```text
//! FIELD2 v1 nx ny hx hy x0 y0
//! <ny lines of nx entries, row j = 0 first>
//! ```
//!
//! Each entry is a decimal value or `*` for an exterior node. Numbers are written
//! with 17 significant digits, which round-trips every `f64` exactly. Interior and
//! boundary nodes are recomputed from the `*` pattern on read.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{DomainMask, Grid2, NodeKind};

const MAGIC: &str = "FIELD2";
const VERSION: &str = "v1";

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_string(field: &ScalarField) -> String {
    let g = field.grid();
    let mut out = String::with_capacity(g.len() * 24 + 128);
    let _ = writeln!(
        out,
        "{MAGIC} {VERSION} {} {} {} {} {} {}",
        g.nx,
        g.ny,
        fmt_f64(g.hx),
        fmt_f64(g.hy),
        fmt_f64(g.x0),
        fmt_f64(g.y0)
    );
    for j in 0..g.ny {
        for i in 0..g.nx {
            if i > 0 {
                out.push(' ');
            }
            match field.value(i, j) {
                Some(v) => out.push_str(&fmt_f64(v)),
                None => out.push('*'),
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_field(field: &ScalarField, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_string(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ScalarField> {
    from_str(&fs::read_to_string(path)?)
}

fn perr(line: usize, offset: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        offset,
        msg: msg.into(),
    }
}

/// Whitespace-separated tokens with their byte offsets inside the line.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let base = line.as_ptr() as usize;
    line.split_whitespace()
        .map(move |t| (t.as_ptr() as usize - base, t))
}

fn parse_finite(tok: &str, line: usize, offset: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| perr(line, offset, format!("invalid number `{tok}`")))?;
    if !v.is_finite() {
        return Err(perr(line, offset, format!("non-finite value `{tok}`")));
    }
    Ok(v)
}

pub fn from_str(text: &str) -> Result<ScalarField> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l));
    let (ln, header) = lines.next().ok_or_else(|| perr(1, 0, "empty file"))?;
    let toks: Vec<(usize, &str)> = tokens(header).collect();
    if toks.len() != 8 {
        return Err(perr(
            ln,
            0,
            format!("header needs 8 fields, found {}", toks.len()),
        ));
    }
    if toks[0].1 != MAGIC {
        return Err(perr(ln, toks[0].0, format!("expected `{MAGIC}`")));
    }
    if toks[1].1 != VERSION {
        return Err(perr(
            ln,
            toks[1].0,
            format!("unsupported version `{}`", toks[1].1),
        ));
    }
    let parse_n = |(off, t): (usize, &str)| -> Result<usize> {
        t.parse::<usize>()
            .map_err(|_| perr(ln, off, format!("invalid count `{t}`")))
    };
    let nx = parse_n(toks[2])?;
    let ny = parse_n(toks[3])?;
    if nx < 3 || ny < 3 {
        return Err(perr(
            ln,
            toks[2].0,
            format!("grid needs nx, ny >= 3 (got {nx} x {ny})"),
        ));
    }
    let mut reals = [0.0; 4];
    for (r, &(off, t)) in reals.iter_mut().zip(&toks[4..]) {
        *r = parse_finite(t, ln, off)?;
    }
    let grid = Grid2::new(nx, ny, reals[0], reals[1], reals[2], reals[3])
        .map_err(|e| perr(ln, toks[4].0, e.to_string()))?;

    let mut active = vec![false; grid.len()];
    let mut values = vec![0.0; grid.len()];
    let mut rows = 0;
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if rows == ny {
            return Err(perr(ln, 0, format!("more than {ny} data rows")));
        }
        let mut count = 0;
        for (off, t) in tokens(line) {
            if count == nx {
                return Err(perr(ln, off, format!("row has more than {nx} entries")));
            }
            let k = grid.idx(count, rows);
            if t != "*" {
                values[k] = parse_finite(t, ln, off)?;
                active[k] = true;
            }
            count += 1;
        }
        if count != nx {
            return Err(perr(
                ln,
                line.len(),
                format!("row has {count} entries, expected {nx}"),
            ));
        }
        rows += 1;
    }
    if rows != ny {
        return Err(perr(
            text.lines().count() + 1,
            0,
            format!("found {rows} data rows, expected {ny}"),
        ));
    }
    let mask = DomainMask::from_active(grid, &active)?;
    debug_assert!(mask
        .kinds()
        .iter()
        .zip(&active)
        .all(|(k, a)| (*k != NodeKind::Exterior) == *a));
    ScalarField::new(mask, values)
}
