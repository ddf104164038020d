//! Max-glueing: patching a plurisubharmonic function on a subdomain into a
//! global one. `Psi = max(u, v)` on the closed patch, `u` outside; the glue
//! stays psh whenever `u >= v` on the patch rim.

use crate::envelope::{frames_for, EnvelopeConfig, SweepPlan};
use crate::field::{BoundaryTrace, ScalarField};
use crate::{Error, Result};

pub struct GlueResult {
    pub field: ScalarField,
    /// Minimum circle-mean surplus of the glued field (discrete psh test).
    pub psh_surplus_min: f64,
    pub worst_node: usize,
}

impl std::fmt::Debug for GlueResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GlueResult")
            .field("psh_surplus_min", &self.psh_surplus_min)
            .field("worst_node", &self.worst_node)
            .finish()
    }
}

/// Glue `v` (defined on the nodes flagged by `v_mask`) over `u`.
///
/// Precondition: `u >= v - tol` at every rim node of the patch (in-mask
/// nodes with an axis neighbor outside the mask); violation reports the
/// worst node. The returned surplus re-certifies the glued field.
pub fn max_glue(
    u: &ScalarField,
    v: &ScalarField,
    v_mask: &[bool],
    tol: f64,
    cfg: &EnvelopeConfig,
) -> Result<GlueResult> {
    assert!(u.same_grid(v), "glue operands live on different grids");
    let grid = u.grid().clone();
    assert_eq!(v_mask.len(), grid.len());
    let strides = grid.strides();

    // Rim of the patch: in-mask, in-domain nodes with an in-domain axis
    // neighbor outside the mask.
    let mut worst_gap = 0.0f64;
    let mut worst_node = usize::MAX;
    for f in 0..grid.len() {
        if !v_mask[f] || !grid.in_domain(f) {
            continue;
        }
        let mut rim = false;
        for k in 0..grid.rd() {
            for sgn in [-1i64, 1] {
                let g = f as i64 + sgn * strides[k] as i64;
                if g >= 0 && (g as usize) < grid.len() {
                    let g = g as usize;
                    if grid.in_domain(g) && !v_mask[g] {
                        rim = true;
                    }
                }
            }
        }
        if rim {
            let gap = v.get(f) - u.get(f);
            if gap > worst_gap {
                worst_gap = gap;
                worst_node = f;
            }
        }
    }
    if worst_gap > tol {
        return Err(Error::GlueHypothesisFailed {
            node: worst_node,
            gap: worst_gap,
        });
    }

    let mut out = u.clone();
    for f in 0..grid.len() {
        if v_mask[f] && grid.in_domain(f) {
            let m = u.get(f).max(v.get(f));
            out.set(f, m);
        }
    }

    // Post-check: the glued field passes the discrete psh test.
    let trace = BoundaryTrace::from_field(&out);
    let plan = SweepPlan::build(grid.clone(), &trace, cfg)?;
    let frames = frames_for(grid.n, 0, plan.dirs.len())?;
    let (surplus, worst) = plan.surplus_min(&out, &frames);
    Ok(GlueResult {
        field: out,
        psh_surplus_min: surplus,
        worst_node: worst,
    })
}

/// Node mask for a ball `|z - center| < radius` (closed on nodes).
pub fn ball_mask(field: &ScalarField, center: &crate::Point, radius: f64) -> Vec<bool> {
    let grid = field.grid();
    (0..grid.len())
        .map(|f| crate::point::dist(&grid.lattice_pos(f), center, grid.rd()) <= radius)
        .collect()
}
