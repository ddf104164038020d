//! Recession directions of unbounded convex domains: unit vectors `v` with
//! `z + k v` inside the domain for every interior `z` and every `k > 0`.

use crate::point;
use crate::{DomainSpec, Error, Point, Result};

/// Deterministic interior probe points: the canonical interior point plus a
/// small axis-aligned cloud around it, kept strictly inside.
fn probe_points(spec: &DomainSpec) -> Vec<Point> {
    let z0 = spec.interior_point();
    let rd = spec.rd();
    let mut pts = vec![z0];
    for k in 0..rd {
        for s in [-1.0, 1.0] {
            for r in [0.1, 0.35] {
                let mut p = z0;
                p[k] += s * r;
                if spec.rho(&p) < 0.0 {
                    pts.push(p);
                }
            }
        }
    }
    pts
}

fn survives(spec: &DomainSpec, v: &Point, probes: &[Point], probe_radius: f64) -> bool {
    for z in probes {
        let mut k = 1.0f64;
        while k <= probe_radius {
            if spec.rho(&point::axpy(z, k, v)) >= 0.0 {
                return false;
            }
            k *= 2.0;
        }
        if spec.rho(&point::axpy(z, probe_radius, v)) >= 0.0 {
            return false;
        }
    }
    true
}

/// Clearance margin of a direction: the worst `-rho` over the probe schedule,
/// normalized by the probe length. Larger is deeper inside.
fn margin(spec: &DomainSpec, v: &Point, probes: &[Point], probe_radius: f64) -> f64 {
    let mut worst = f64::INFINITY;
    for z in probes {
        let mut k = 1.0f64;
        while k <= probe_radius {
            let m = -spec.rho(&point::axpy(z, k, v)) / k;
            worst = worst.min(m);
            k *= 2.0;
        }
    }
    worst
}

/// Find a recession direction by scanning a deterministic direction set
/// (signed coordinate axes first, then a low-discrepancy sphere set of
/// `samples` points) with a geometric containment schedule `k = 1, 2, 4, ...`
/// up to `probe_radius`, then refining locally around the best survivor.
pub fn recession_direction(
    spec: &DomainSpec,
    probe_radius: f64,
    samples: usize,
) -> Result<Point> {
    if !spec.convex() {
        return Err(Error::InvalidParams(
            "recession search requires a convex domain".into(),
        ));
    }
    if spec.bounded() {
        return Err(Error::NoRecessionDirection);
    }
    let rd = spec.rd();
    let probes = probe_points(spec);
    let dirs = point::sphere_directions(rd, samples.max(4 * rd));

    let mut best: Option<(f64, Point)> = None;
    for v in &dirs {
        if survives(spec, v, &probes, probe_radius) {
            let m = margin(spec, v, &probes, probe_radius);
            // Signed axes come first in the scan; an axis survivor with a
            // non-degenerate margin is returned exactly.
            if best.is_none() {
                best = Some((m, *v));
            } else if let Some((bm, _)) = best {
                if m > bm + 1e-12 {
                    best = Some((m, *v));
                }
            }
        }
    }
    let Some((_, mut v)) = best else {
        return Err(Error::NoRecessionDirection);
    };

    // Local refinement: hill-climb the margin over shrinking axis perturbations.
    let mut step = 0.25f64;
    let mut m_best = margin(spec, &v, &probes, probe_radius);
    while step > 1e-4 {
        let mut improved = false;
        for k in 0..rd {
            for s in [-1.0, 1.0] {
                let mut w = v;
                w[k] += s * step;
                let nw = point::norm(&w, rd);
                if nw <= 0.0 {
                    continue;
                }
                let w = point::scale(&w, 1.0 / nw);
                if survives(spec, &w, &probes, probe_radius) {
                    let m = margin(spec, &w, &probes, probe_radius);
                    if m > m_best + 1e-12 {
                        m_best = m;
                        v = w;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(v)
}

/// Replay the containment schedule for a claimed direction; used by tests
/// and reports to certify a returned direction.
pub fn replay_recession(spec: &DomainSpec, v: &Point, probe_radius: f64) -> bool {
    let probes = probe_points(spec);
    survives(spec, v, &probes, probe_radius)
}
