//! q-Bremermann verification: a field is q-Bremermann when it is both
//! q-plurisubharmonic and (n-q-1)-plurisuperharmonic. Maximal psh solutions
//! are the q = 0 case.

use serde::{Deserialize, Serialize};

use crate::envelope::{frames_for, EnvelopeConfig, SweepPlan};
use crate::field::{BoundaryTrace, ScalarField};
use crate::Result;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QBremermannReport {
    pub q: usize,
    pub is_q_psh: bool,
    pub is_nq1_psuperh: bool,
    pub pass: bool,
    pub q_surplus: f64,
    pub nq1_surplus: f64,
    pub tol: f64,
}

/// Run both discrete frame tests on `field`. `trace` supplies wall values
/// for the sample plans (pass the solving trace to keep wall pins exact).
pub fn q_bremermann_check(
    field: &ScalarField,
    trace: &BoundaryTrace,
    q: usize,
    cfg: &EnvelopeConfig,
    tol: f64,
) -> Result<QBremermannReport> {
    let grid = field.grid().clone();
    let n = grid.n;

    let plan = SweepPlan::build(grid.clone(), trace, cfg)?;
    let frames_q = frames_for(n, q, plan.dirs.len())?;
    let (q_surplus, _) = plan.surplus_min(field, &frames_q);

    let neg_plan = SweepPlan::build(grid.clone(), &trace.negate(), cfg)?;
    let frames_nq1 = frames_for(n, n - q - 1, neg_plan.dirs.len())?;
    let (nq1_surplus, _) = neg_plan.surplus_min(&field.negate(), &frames_nq1);

    let is_q_psh = q_surplus >= -tol;
    let is_nq1_psuperh = nq1_surplus >= -tol;
    Ok(QBremermannReport {
        q,
        is_q_psh,
        is_nq1_psuperh,
        pass: is_q_psh && is_nq1_psuperh,
        q_surplus,
        nq1_surplus,
        tol,
    })
}
