//! Slice maximum principle: on a bounded component of the domain cut by a
//! real hyperplane, a psh function attains its maximum on the part of the
//! component's boundary lying on the domain wall (not on the cut).

use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::geometry::NodeClass;
use crate::point;
use crate::{Error, Point, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SliceReport {
    pub max_on_component: f64,
    pub max_on_sigma: f64,
    pub pass: bool,
    pub component_nodes: usize,
    pub sigma_nodes: usize,
    pub tol: f64,
}

/// Check the maximum principle on the component of
/// `{Re<z, normal> > offset}` containing its first interior node in index
/// order. `Sigma` is the set of wall (boundary-class) nodes adjacent to the
/// component; the closure also includes the interior nodes just across the
/// cut, which count toward the component maximum.
pub fn slice_max_check(
    field: &ScalarField,
    normal: &Point,
    offset: f64,
    tol: f64,
) -> Result<SliceReport> {
    let grid = field.grid().clone();
    if grid.n < 2 {
        return Err(Error::InvalidParams(
            "slice check needs complex dimension >= 2".into(),
        ));
    }
    let n = grid.n;
    let side = |f: usize| point::re_inner(&grid.lattice_pos(f), normal, n) - offset > 0.0;

    let seed = grid
        .interior()
        .iter()
        .copied()
        .find(|&f| side(f as usize))
        .ok_or_else(|| Error::InvalidParams("hyperplane misses the domain interior".into()))?;

    // Flood fill over interior nodes on the positive side.
    let strides = grid.strides();
    let mut in_comp = vec![false; grid.len()];
    let mut stack = vec![seed as usize];
    in_comp[seed as usize] = true;
    let mut comp_nodes = Vec::new();
    while let Some(f) = stack.pop() {
        comp_nodes.push(f);
        for k in 0..grid.rd() {
            for sgn in [-1i64, 1] {
                let g = f as i64 + sgn * strides[k] as i64;
                if g < 0 || g as usize >= grid.len() {
                    continue;
                }
                let g = g as usize;
                if !in_comp[g] && grid.class(g) == NodeClass::Interior && side(g) {
                    in_comp[g] = true;
                    stack.push(g);
                }
            }
        }
    }

    // The component must be resolved as bounded: it may not touch the hull.
    for &f in &comp_nodes {
        let idx = grid.idx(f);
        for k in 0..grid.rd() {
            if idx[k] == 0 || idx[k] + 1 == grid.dims[k] {
                return Err(Error::UnboundedComponent);
            }
        }
    }

    let mut max_comp = f64::NEG_INFINITY;
    let mut max_sigma = f64::NEG_INFINITY;
    let mut sigma_count = 0usize;
    for &f in &comp_nodes {
        max_comp = max_comp.max(field.get(f));
        for k in 0..grid.rd() {
            for sgn in [-1i64, 1] {
                let g = (f as i64 + sgn * strides[k] as i64) as usize;
                match grid.class(g) {
                    NodeClass::Boundary => {
                        // Wall part of the component closure: Sigma.
                        max_sigma = max_sigma.max(field.get(g));
                        max_comp = max_comp.max(field.get(g));
                        sigma_count += 1;
                    }
                    NodeClass::Interior if !in_comp[g] => {
                        // Closure face on the cut hyperplane.
                        max_comp = max_comp.max(field.get(g));
                    }
                    _ => {}
                }
            }
        }
    }
    if sigma_count == 0 {
        return Err(Error::InvalidParams(
            "component closure never meets the domain wall".into(),
        ));
    }

    Ok(SliceReport {
        max_on_component: max_comp,
        max_on_sigma: max_sigma,
        pass: max_comp <= max_sigma + tol,
        component_nodes: comp_nodes.len(),
        sigma_nodes: sigma_count,
        tol,
    })
}
