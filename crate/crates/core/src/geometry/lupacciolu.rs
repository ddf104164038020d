//! The Lupacciolu polynomial condition and the Veronese embedding dimension.
//!
//! Condition (L'): there is a polynomial `P` with
//! `|P(z)|^2 > (1 + |z|^2)^{deg P}` on the whole domain. The check is
//! sample-based over grid nodes and far-field rays: a positive answer is
//! evidence, not a proof, and the report says so.

use serde::{Deserialize, Serialize};

use crate::geometry::domain::{Polynomial, Region};
use crate::geometry::grid::Grid;
use crate::geometry::recession::recession_direction;
use crate::point;
use crate::{Error, Point, Result};

/// `N = binom(n + d, d) - 1`, the ambient projective dimension of the
/// degree-`d` Veronese embedding of CP^n.
pub fn veronese_dimension(n: u64, d: u64) -> Result<u64> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParams("veronese needs n >= 1, d >= 1".into()));
    }
    // binom(n + d, d) multiplicatively with overflow checks.
    let mut acc: u128 = 1;
    for k in 1..=d.min(n) {
        let m = n + d - k + 1;
        acc = acc
            .checked_mul(m as u128)
            .ok_or(Error::ArithmeticOverflow)?;
        acc /= k as u128;
    }
    let out = acc.checked_sub(1).ok_or(Error::ArithmeticOverflow)?;
    u64::try_from(out).map_err(|_| Error::ArithmeticOverflow)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LupacciouluReport {
    pub holds: bool,
    pub worst_margin: f64,
    pub witness: Vec<f64>,
    pub degree: u32,
    pub samples_used: usize,
    /// The verdict is sampled evidence, not a semialgebraic proof.
    pub note: String,
}

fn margin_at(poly: &Polynomial, p: &Point, n: usize, deg: u32) -> f64 {
    let mut z2 = 0.0;
    for k in 0..2 * n {
        z2 += p[k] * p[k];
    }
    poly.abs2(p, n) - (1.0 + z2).powi(deg as i32)
}

/// Sample `|P|^2 - (1 + |z|^2)^{deg P}` over interior and boundary nodes of
/// `grid` plus far-field rays along the recession direction (when one
/// exists). `sample_points` caps the number of node samples.
pub fn lupacciolu_check(
    poly: &Polynomial,
    region: &Region,
    grid: &Grid,
    sample_points: usize,
) -> Result<LupacciouluReport> {
    if sample_points == 0 {
        return Err(Error::InvalidParams("sample_points must be >= 1".into()));
    }
    let n = region.n();
    let deg = poly.degree();
    let mut worst = f64::INFINITY;
    let mut witness = point::ZERO;
    let mut used = 0usize;

    let consider = |p: &Point, worst: &mut f64, witness: &mut Point, used: &mut usize| {
        let m = margin_at(poly, p, n, deg);
        *used += 1;
        if m < *worst {
            *worst = m;
            *witness = *p;
        }
    };

    // Deterministic node subsample: a fixed stride over interior then
    // boundary nodes.
    let nodes: Vec<u32> = grid
        .interior()
        .iter()
        .chain(grid.boundary().iter())
        .copied()
        .collect();
    let stride = (nodes.len() / sample_points).max(1);
    for &f in nodes.iter().step_by(stride) {
        consider(&grid.pos(f as usize), &mut worst, &mut witness, &mut used);
    }

    // Far-field rays along the recession direction, geometric schedule.
    if !region.spec.bounded() && region.spec.convex() {
        if let Ok(v) = recession_direction(&region.spec, crate::defaults::PROBE_RADIUS, 32) {
            let z0 = region.spec.interior_point();
            let mut k = 1.0f64;
            while k <= crate::defaults::PROBE_RADIUS {
                let p = point::axpy(&z0, k, &v);
                if region.spec.rho(&p) < 0.0 {
                    consider(&p, &mut worst, &mut witness, &mut used);
                }
                k *= 2.0;
            }
        }
    }

    Ok(LupacciouluReport {
        holds: worst > 0.0,
        worst_margin: worst,
        witness: witness[..2 * n].to_vec(),
        degree: deg,
        samples_used: used,
        note: "sampled check: positive verdict is evidence, not proof".into(),
    })
}
