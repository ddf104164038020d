//! Lipschitz certificates for envelope solutions via the psh barrier pair
//! `lower = h~ + a rho`, `upper = h~ - a rho`, which pin the envelope from
//! both sides and carry an explicit edge-measured Lipschitz constant.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::defaults::LIPSCHITZ_A_MAX;
use crate::envelope::{psh_envelope, psh_surplus_closed_form, EnvelopeConfig};
use crate::field::{BoundaryTrace, ScalarField, TraceFn};
use crate::geometry::Grid;
use crate::point;
use crate::{par, Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LipschitzCertificate {
    /// Barrier multiple that made both barriers pass their psh tests.
    pub a_used: f64,
    /// Lipschitz constant measured over grid edges of the barrier pair.
    pub k: f64,
    pub verified: bool,
    pub sandwich_ok: bool,
    pub pairwise_ok: bool,
    /// Worst violation of `|u(z1)-u(z2)| <= k |z1-z2| + tol` over node pairs
    /// within three cells.
    pub worst_pair_excess: f64,
    pub barrier_surplus: f64,
    pub tol: f64,
}

/// Escalate `a` by doubling from `a0` until `h~ + a rho` passes the discrete
/// psh test and `h~ - a rho` the plurisuperharmonic one, then certify the
/// solved envelope against the pair. `htilde` is a two-sided extension of
/// the boundary data, evaluable on the whole grid box.
pub fn lipschitz_certificate(
    grid: &Arc<Grid>,
    htilde: &TraceFn,
    a0: f64,
    cfg: &EnvelopeConfig,
    tol: f64,
) -> Result<LipschitzCertificate> {
    if a0 <= 0.0 {
        return Err(Error::InvalidParams(
            "barrier multiple must be positive".into(),
        ));
    }
    let region = grid.region().clone();
    let mut a = a0;
    let mut barrier_surplus = f64::NEG_INFINITY;
    let mut pair = None;
    while a <= a0 * LIPSCHITZ_A_MAX {
        let mk = |sign: f64| -> TraceFn {
            let h = htilde.clone();
            let r = region.clone();
            Arc::new(move |p: &crate::Point| sign * h(p) + a * r.rho(p))
        };
        // `h~ + a rho` must be psh and `h~ - a rho` plurisuperharmonic,
        // i.e. `-h~ + a rho` psh as well; both tested from the closed forms.
        let (s_lo, _) = psh_surplus_closed_form(grid, &mk(1.0), cfg)?;
        let (s_hi, _) = psh_surplus_closed_form(grid, &mk(-1.0), cfg)?;
        barrier_surplus = s_lo.min(s_hi);
        if barrier_surplus >= -tol {
            let h = htilde.clone();
            let r = region.clone();
            let lo = ScalarField::from_fn(grid.clone(), move |p| h(p) + a * r.rho(p));
            let h = htilde.clone();
            let r = region.clone();
            let hi = ScalarField::from_fn(grid.clone(), move |p| h(p) - a * r.rho(p));
            pair = Some((lo, hi));
            break;
        }
        a *= 2.0;
    }
    let Some((lower, upper)) = pair else {
        return Err(Error::BarrierNotPsh {
            a_max: a0 * LIPSCHITZ_A_MAX,
        });
    };

    // Lipschitz constant of the pair over grid edges (snapped positions).
    let strides = grid.strides();
    let rd = grid.rd();
    let mut k_meas = 0.0f64;
    for f in 0..grid.len() {
        if !grid.in_domain(f) {
            continue;
        }
        for ax in 0..rd {
            let g = f + strides[ax];
            if g >= grid.len() || !grid.in_domain(g) {
                continue;
            }
            let d = point::dist(&grid.pos(f), &grid.pos(g), rd);
            if d <= 1e-12 {
                continue;
            }
            k_meas = k_meas.max((lower.get(f) - lower.get(g)).abs() / d);
            k_meas = k_meas.max((upper.get(f) - upper.get(g)).abs() / d);
        }
    }
    let k = k_meas;

    // Solve for the restricted data and verify the sandwich.
    let h = htilde.clone();
    let trace = BoundaryTrace::signed_from_fn(grid.clone(), move |p| h(p))?;
    let run = psh_envelope(grid, &trace, cfg)?;
    let u = run.field;
    let mut sandwich_ok = true;
    for f in 0..grid.len() {
        if !grid.in_domain(f) {
            continue;
        }
        if lower.get(f) > u.get(f) + tol || u.get(f) > upper.get(f) + tol {
            sandwich_ok = false;
            break;
        }
    }

    // Pairwise Lipschitz bound over node pairs within three cells.
    let window: Vec<i64> = {
        let mut offs = Vec::new();
        let lim = |kk: usize| if kk < rd { 3i64 } else { 0 };
        for a4 in -lim(0)..=lim(0) {
            for b in -lim(1)..=lim(1) {
                for c in -lim(2)..=lim(2) {
                    for d in -lim(3)..=lim(3) {
                        let off = a4
                            + b * strides[1] as i64
                            + c * strides[2] as i64
                            + d * strides[3] as i64;
                        if off > 0
                            && (a4 * a4 + b * b + c * c + d * d) as f64 <= 9.0 + 1e-9
                        {
                            offs.push(off);
                        }
                    }
                }
            }
        }
        offs
    };
    let excess = par::max_indexed(grid.len(), |f| {
        if !grid.in_domain(f) {
            return f64::NEG_INFINITY;
        }
        let pf = grid.pos(f);
        let mut worst = f64::NEG_INFINITY;
        for &off in &window {
            let g = f as i64 + off;
            if g < 0 || g as usize >= grid.len() || !grid.in_domain(g as usize) {
                continue;
            }
            let g = g as usize;
            let d = point::dist(&pf, &grid.pos(g), rd);
            if d <= 1e-12 || d > 3.0 * grid.spacing + 1e-9 {
                continue;
            }
            worst = worst.max((u.get(f) - u.get(g)).abs() - k * d);
        }
        worst
    });
    let pairwise_ok = excess <= tol;

    Ok(LipschitzCertificate {
        a_used: a,
        k,
        verified: sandwich_ok && pairwise_ok,
        sandwich_ok,
        pairwise_ok,
        worst_pair_excess: excess,
        barrier_surplus,
        tol,
    })
}
