//! CSV serialization for fields and masks, and JSON report helpers.
//!
//! Numbers print through Rust's shortest round-trip formatting, and rows
//! follow flat index order, so identical runs produce byte-identical files
//! regardless of worker count.

use std::fmt::Write as _;
use std::path::Path;

use crate::field::ScalarField;
use crate::geometry::{Grid, NodeClass};
use crate::Result;

fn class_name(c: NodeClass) -> &'static str {
    match c {
        NodeClass::Interior => "interior",
        NodeClass::Boundary => "boundary",
        NodeClass::Exterior => "exterior",
    }
}

fn header(n: usize, with_value: bool) -> String {
    let mut s = String::from("i");
    for k in 0..2 * n {
        let _ = write!(s, ",i{k}");
    }
    for j in 1..=n {
        let _ = write!(s, ",x{j},y{j}");
    }
    s.push_str(",class");
    if with_value {
        s.push_str(",value");
    }
    s.push('\n');
    s
}

/// Field CSV: one row per in-domain node (interior and boundary), flat
/// index order; coordinates are node positions (snapped for boundary).
pub fn field_to_csv(field: &ScalarField) -> String {
    let grid = field.grid();
    let rd = grid.rd();
    let mut out = header(grid.n, true);
    for f in 0..grid.len() {
        if !grid.in_domain(f) {
            continue;
        }
        let idx = grid.idx(f);
        let pos = grid.pos(f);
        let _ = write!(out, "{f}");
        for k in 0..rd {
            let _ = write!(out, ",{}", idx[k]);
        }
        for k in 0..rd {
            let _ = write!(out, ",{}", pos[k]);
        }
        let _ = writeln!(out, ",{},{}", class_name(grid.class(f)), field.get(f));
    }
    out
}

/// Mask CSV: one row per node of the grid, all three classes.
pub fn mask_to_csv(grid: &Grid) -> String {
    let rd = grid.rd();
    let mut out = header(grid.n, false);
    for f in 0..grid.len() {
        let idx = grid.idx(f);
        let pos = grid.pos(f);
        let _ = write!(out, "{f}");
        for k in 0..rd {
            let _ = write!(out, ",{}", idx[k]);
        }
        for k in 0..rd {
            let _ = write!(out, ",{}", pos[k]);
        }
        let _ = writeln!(out, ",{}", class_name(grid.class(f)));
    }
    out
}

pub fn write_field_csv(field: &ScalarField, path: &Path) -> Result<()> {
    std::fs::write(path, field_to_csv(field))?;
    Ok(())
}

pub fn write_mask_csv(grid: &Grid, path: &Path) -> Result<()> {
    std::fs::write(path, mask_to_csv(grid))?;
    Ok(())
}

/// Serialize a report with stable key order (struct declaration order).
pub fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}
