//! The pluriharmonic sandwich: the maximal psh solution sits below every
//! harmonic solution, which sits below the minimal plurisuperharmonic one.
//! When the outer two meet, all of them agree and the data admits a
//! pluriharmonic extension.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::envelope::harmonic::harmonic_solution;
use crate::envelope::{plurisuperharmonic_envelope, psh_envelope, EnvelopeConfig};
use crate::field::{BoundaryTrace, ScalarField};
use crate::geometry::Grid;
use crate::Result;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    /// Sup of `chi - phi` over interior nodes and its argmax position.
    pub max_gap: f64,
    pub gap_argmax: Vec<f64>,
    pub pluriharmonic: bool,
    /// Worst violations of `phi <= eta` and `eta <= chi` (node-wise).
    pub order_violation_low: f64,
    pub order_violation_high: f64,
    pub tol_pluri: f64,
    pub tol_order: f64,
}

pub struct SandwichRun {
    pub phi: ScalarField,
    pub eta: ScalarField,
    pub chi: ScalarField,
    pub report: SandwichReport,
}

/// Compute the maximal psh solution `phi`, a harmonic solution `eta` and
/// the minimal plurisuperharmonic solution `chi` for the same (bounded,
/// possibly signed) data and compare them.
///
/// `tol_pluri` defaults to `max(10 tol_iter, spacing^2 (range + 1))`: the
/// gap must exceed both solver noise and the discretization scale before it
/// is evidence against a pluriharmonic extension.
pub fn pluriharmonic_sandwich(
    grid: &Arc<Grid>,
    trace: &BoundaryTrace,
    cfg: &EnvelopeConfig,
    tol_pluri: Option<f64>,
) -> Result<SandwichRun> {
    let phi = psh_envelope(grid, trace, cfg)?;
    let eta = harmonic_solution(grid, trace, cfg)?;
    let chi = plurisuperharmonic_envelope(grid, trace, cfg)?;

    let tol_iter = phi.tol_iter;
    let tol_pluri = tol_pluri.unwrap_or_else(|| {
        (10.0 * tol_iter).max(grid.spacing * grid.spacing * (trace.range() + 1.0))
    });
    let tol_order = 1e3 * tol_iter;

    let mut max_gap = f64::NEG_INFINITY;
    let mut argmax = 0usize;
    let mut viol_low: f64 = 0.0;
    let mut viol_high: f64 = 0.0;
    for &f in grid.interior() {
        let f = f as usize;
        let (p, e, c) = (phi.field.get(f), eta.field.get(f), chi.field.get(f));
        let gap = c - p;
        if gap > max_gap {
            max_gap = gap;
            argmax = f;
        }
        viol_low = viol_low.max(p - e);
        viol_high = viol_high.max(e - c);
    }
    let pos = grid.pos(argmax);
    let report = SandwichReport {
        max_gap,
        gap_argmax: pos[..grid.rd()].to_vec(),
        pluriharmonic: max_gap <= tol_pluri,
        order_violation_low: viol_low,
        order_violation_high: viol_high,
        tol_pluri,
        tol_order,
    };
    Ok(SandwichRun {
        phi: phi.field,
        eta: eta.field,
        chi: chi.field,
        report,
    })
}
