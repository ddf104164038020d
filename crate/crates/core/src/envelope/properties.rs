//! Structural properties of the envelope operator, checked numerically:
//! constant shifts, monotonicity in the data, lower bound under pointwise
//! suprema, the sup-norm identity between data and envelopes, and stability
//! under trace convergence.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::envelope::{psh_envelope, EnvelopeConfig};
use crate::field::BoundaryTrace;
use crate::geometry::Grid;
use crate::Result;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub residual: f64,
    pub bound: f64,
    pub pass: bool,
}

fn check(residual: f64, bound: f64) -> PropertyCheck {
    PropertyCheck {
        residual,
        bound,
        pass: residual <= bound,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertiesReport {
    /// (i) envelope(h + c) = envelope(h) + c.
    pub shift: PropertyCheck,
    /// (ii) h1 <= h2 implies envelope(h1) <= envelope(h2).
    pub monotone: PropertyCheck,
    /// (iii) envelope(max(h1, h2)) >= max of the envelopes.
    pub sup_lower_bound: PropertyCheck,
    /// (iv) sup |env(h1) - env(h2)| = sup |h1 - h2| on the wall (two-sided).
    pub norm_identity: PropertyCheck,
    /// (v) envelopes converge when the traces do: pairs of
    /// (trace distance, envelope distance) for a geometric blend sequence.
    pub convergence: Vec<(f64, f64)>,
    pub convergence_pass: bool,
    pub h1_le_h2: bool,
    pub tol: f64,
    pub norm_tol: f64,
}

impl PropertiesReport {
    pub fn all_pass(&self) -> bool {
        self.shift.pass
            && self.monotone.pass
            && self.sup_lower_bound.pass
            && self.norm_identity.pass
            && self.convergence_pass
    }
}

/// Run the property suite for data `h1`, `h2` and shift `c`. Properties
/// (i)-(iii) and (v) are bounded by `2 tol_iter`; the two-sided norm
/// identity (iv) uses the separate `norm_tol` since both sides carry
/// discretization error.
pub fn pb_properties_suite(
    grid: &Arc<Grid>,
    h1: &BoundaryTrace,
    h2: &BoundaryTrace,
    c: f64,
    cfg: &EnvelopeConfig,
    norm_tol: f64,
) -> Result<PropertiesReport> {
    let tol = cfg.effective_tol(h1.range().max(h2.range()));
    let u1 = psh_envelope(grid, h1, cfg)?.field;
    let u2 = psh_envelope(grid, h2, cfg)?.field;
    let u1c = psh_envelope(grid, &h1.shift(c), cfg)?.field;
    let umax = psh_envelope(grid, &h1.max_with(h2), cfg)?.field;

    let in_domain: Vec<usize> = (0..grid.len()).filter(|&f| grid.in_domain(f)).collect();

    // (i) shift equivariance.
    let mut r_shift: f64 = 0.0;
    for &f in &in_domain {
        r_shift = r_shift.max((u1c.get(f) - (u1.get(f) + c)).abs());
    }

    // (ii) monotonicity, on an ordered pair of traces.
    let h1_le_h2 = h1
        .values()
        .iter()
        .zip(h2.values())
        .all(|(a, b)| a <= b);
    let (lo_env, hi_env) = if h1_le_h2 { (&u1, &u2) } else { (&u1, &umax) };
    let mut r_mono = f64::NEG_INFINITY;
    for &f in &in_domain {
        r_mono = r_mono.max(lo_env.get(f) - hi_env.get(f));
    }

    // (iii) envelope of the sup dominates the sup of envelopes.
    let mut r_sup = f64::NEG_INFINITY;
    for &f in &in_domain {
        r_sup = r_sup.max(u1.get(f).max(u2.get(f)) - umax.get(f));
    }

    // (iv) sup-norm identity.
    let mut lhs: f64 = 0.0;
    for &f in &in_domain {
        lhs = lhs.max((u1.get(f) - u2.get(f)).abs());
    }
    let mut rhs: f64 = 0.0;
    for (a, b) in h1.values().iter().zip(h2.values()) {
        rhs = rhs.max((a - b).abs());
    }
    let r_norm = (lhs - rhs).abs();

    // (v) trace convergence h_k -> h1 drives the envelopes together.
    let mut pairs = Vec::new();
    let mut conv_pass = true;
    let mut prev_env = f64::INFINITY;
    for k in 1..=3u32 {
        let t = 1.0 / (1 << k) as f64;
        let hk = h1.blend(h2, t);
        let uk = psh_envelope(grid, &hk, cfg)?.field;
        let mut env_dist: f64 = 0.0;
        for &f in &in_domain {
            env_dist = env_dist.max((uk.get(f) - u1.get(f)).abs());
        }
        let mut trace_dist: f64 = 0.0;
        for (a, b) in hk.values().iter().zip(h1.values()) {
            trace_dist = trace_dist.max((a - b).abs());
        }
        if env_dist > trace_dist + 2.0 * tol || env_dist > prev_env + 2.0 * tol {
            conv_pass = false;
        }
        prev_env = env_dist;
        pairs.push((trace_dist, env_dist));
    }

    Ok(PropertiesReport {
        shift: check(r_shift, 2.0 * tol),
        monotone: check(r_mono.max(0.0), 2.0 * tol),
        sup_lower_bound: check(r_sup.max(0.0), 2.0 * tol),
        norm_identity: check(r_norm, norm_tol),
        convergence: pairs,
        convergence_pass: conv_pass,
        h1_le_h2,
        tol,
        norm_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, DomainSpec, Region};

    #[test]
    fn constant_traces_make_every_property_exact() {
        let region = Region::from_spec(DomainSpec::ball(1, &[0.0, 0.0], 1.0).unwrap());
        let grid = build_grid(&region, &[[-1.1, 1.1], [-1.1, 1.1]], 0.1).unwrap();
        let h1 = BoundaryTrace::from_fn(grid.clone(), |_| 1.0).unwrap();
        let h2 = BoundaryTrace::from_fn(grid.clone(), |_| 2.0).unwrap();
        let rep =
            pb_properties_suite(&grid, &h1, &h2, 3.0, &EnvelopeConfig::for_dim(1), 1e-6).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
        // (i) is the identity instance: residual at machine scale.
        assert!(rep.shift.residual <= 1e-12);
        // (iv) both sides equal 1 for constant data.
        assert!(rep.norm_identity.residual <= 1e-12);
        assert!(rep.h1_le_h2);
    }
}
