//! Nested slab/ball exhaustions of unbounded convex domains.
//!
//! After pre-rotation the recession direction is the first real axis of the
//! frame, `x1(z) = Re<z, v>`. The plan pairs slab cuts `c'_nu` with ball
//! radii `c_nu` so that
//! `{x1 < c'_nu} ∩ Ω  ⊂  B(0; c_nu) ∩ Ω  ⊂  {x1 < c'_{nu+1}}`.

use serde::{Deserialize, Serialize};

use crate::point;
use crate::{DomainSpec, Error, Point, Result};

/// Exhaustion data: recession direction, slab cuts and ball radii.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExhaustionPlan {
    /// Unit recession direction (a complex direction stored as a real point).
    pub v: Point,
    /// Strictly increasing slab cuts `c'_nu`.
    pub c_prime: Vec<f64>,
    /// Strictly increasing ball radii `c_nu`.
    pub c: Vec<f64>,
    pub nu_max: usize,
}

impl ExhaustionPlan {
    /// Frame coordinate `x1(z) = Re<z, v>`.
    pub fn x1(&self, z: &Point, n: usize) -> f64 {
        point::re_inner(z, &self.v, n)
    }

    /// Frame coordinate `y1(z) = Im<z, v>`.
    pub fn y1(&self, z: &Point, n: usize) -> f64 {
        point::im_inner(z, &self.v, n)
    }
}

/// Radial extent of the convex slab region `Ω ∩ {x1 < c}` from an interior
/// anchor along direction `u`; `None` when the ray never leaves (unbounded).
fn ray_extent(
    spec: &DomainSpec,
    v: &Point,
    c: f64,
    anchor: &Point,
    u: &Point,
    t_cap: f64,
) -> Option<f64> {
    let n = spec.n;
    let inside = |t: f64| {
        let p = point::axpy(anchor, t, u);
        spec.rho(&p) < 0.0 && point::re_inner(&p, v, n) < c
    };
    if !inside(0.0) {
        return Some(0.0);
    }
    let mut hi = 1.0f64;
    while inside(hi) {
        hi *= 2.0;
        if hi > t_cap {
            return None;
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Anchor point inside `Ω ∩ {x1 < c}`, pulled backward along `v` from the
/// canonical interior point.
fn slab_anchor(spec: &DomainSpec, v: &Point, c: f64) -> Result<Point> {
    let n = spec.n;
    let mut z = spec.interior_point();
    let step = 0.05 * c.max(0.1);
    for _ in 0..100_000 {
        if point::re_inner(&z, v, n) < 0.75 * c {
            break;
        }
        let back = point::axpy(&z, -step, v);
        if spec.rho(&back) >= 0.0 {
            break;
        }
        z = back;
    }
    if spec.rho(&z) < 0.0 && point::re_inner(&z, v, n) < c {
        Ok(z)
    } else {
        Err(Error::InvalidParams(format!(
            "no interior anchor below the slab cut {c}"
        )))
    }
}

/// Build the paired exhaustion sequences. `slab_step` spaces the cuts
/// (`c'_nu = nu * slab_step`); `margin` is added to each measured enclosing
/// radius (one grid spacing of the downstream solve is a good choice).
///
/// For a bounded domain the plan is a single level covering everything.
pub fn build_exhaustion(
    spec: &DomainSpec,
    v: &Point,
    nu_max: usize,
    slab_step: f64,
    margin: f64,
) -> Result<ExhaustionPlan> {
    if nu_max == 0 || slab_step <= 0.0 || margin <= 0.0 {
        return Err(Error::InvalidParams(
            "nu_max, slab_step and margin must be positive".into(),
        ));
    }
    let rd = spec.rd();
    let n = spec.n;
    let t_cap = 1e5;

    if spec.bounded() {
        // Single level covering the whole domain.
        let anchor = spec.interior_point();
        let dirs = point::sphere_directions(rd, if rd == 2 { 256 } else { 2048 });
        let mut rmax = 0.0f64;
        let mut x1max = f64::NEG_INFINITY;
        for u in &dirs {
            let t = ray_extent(spec, v, f64::INFINITY, &anchor, u, t_cap)
                .ok_or(Error::UnboundedSlab)?;
            let p = point::axpy(&anchor, t, u);
            rmax = rmax.max(point::norm(&p, rd));
            x1max = x1max.max(point::re_inner(&p, v, n));
        }
        return Ok(ExhaustionPlan {
            v: *v,
            c_prime: vec![x1max + margin],
            c: vec![rmax + margin],
            nu_max: 1,
        });
    }

    let dirs = point::sphere_directions(rd, if rd == 2 { 512 } else { 4096 });
    let mut c_prime = Vec::with_capacity(nu_max);
    let mut c = Vec::with_capacity(nu_max);
    for nu in 1..=nu_max {
        let cut = nu as f64 * slab_step;
        let anchor = slab_anchor(spec, v, cut)?;
        let mut rmax = 0.0f64;
        for u in &dirs {
            let t = ray_extent(spec, v, cut, &anchor, u, t_cap).ok_or(Error::UnboundedSlab)?;
            let p = point::axpy(&anchor, t, u);
            rmax = rmax.max(point::norm(&p, rd));
        }
        c_prime.push(cut);
        c.push(rmax + margin);
    }
    // Nesting: B(0; c_nu) ∩ Ω ⊂ {x1 < c'_{nu+1}} needs c_nu < c'_{nu+1}.
    for nu in 0..nu_max - 1 {
        if c[nu] >= c_prime[nu + 1] {
            return Err(Error::InvalidParams(format!(
                "nesting fails at level {}: ball radius {:.4} reaches the next slab cut {:.4}; increase slab_step",
                nu + 1,
                c[nu],
                c_prime[nu + 1]
            )));
        }
    }
    for nu in 1..nu_max {
        if c[nu] <= c[nu - 1] {
            return Err(Error::InvalidParams(
                "ball radii are not strictly increasing".into(),
            ));
        }
    }
    Ok(ExhaustionPlan {
        v: *v,
        c_prime,
        c,
        nu_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::domain::Shape;

    fn strip() -> DomainSpec {
        // {Re z > 0, |Im z| < 1} in C^1.
        DomainSpec::new(
            1,
            Shape::StripConvex {
                normal: vec![1.0, 0.0],
                offset: 0.0,
                strip_normal: vec![0.0, 1.0],
                half_width: 1.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn strip_radii_match_grid_scan_oracle() {
        let spec = strip();
        let v = [1.0, 0.0, 0.0, 0.0];
        let margin = 0.05;
        let plan = build_exhaustion(&spec, &v, 3, 1.0, margin).unwrap();
        assert_eq!(plan.c_prime, vec![1.0, 2.0, 3.0]);
        // Independent oracle: minimal enclosing radius of the slab by grid scan.
        let h = 0.005;
        for (nu, &cut) in plan.c_prime.iter().enumerate() {
            let mut r_scan = 0.0f64;
            let mut x = 0.0;
            while x < cut {
                let mut y = -1.0;
                while y <= 1.0 {
                    let p = [x, y, 0.0, 0.0];
                    if spec.rho(&p) < 0.0 && x < cut {
                        r_scan = r_scan.max(point::norm(&p, 2));
                    }
                    y += h;
                }
                x += h;
            }
            let expected = (cut * cut + 1.0).sqrt();
            assert!((r_scan - expected).abs() < 0.02, "scan {r_scan} vs {expected}");
            assert!(plan.c[nu] >= r_scan);
            assert!(plan.c[nu] <= expected + margin + 0.02);
        }
    }

    #[test]
    fn bounded_domain_gets_a_single_covering_level() {
        let spec = DomainSpec::ball(1, &[0.0, 0.0], 1.0).unwrap();
        let plan = build_exhaustion(&spec, &[1.0, 0.0, 0.0, 0.0], 3, 1.0, 0.1).unwrap();
        assert_eq!(plan.nu_max, 1);
        assert!(plan.c[0] >= 1.0 && plan.c[0] <= 1.2);
        assert!(plan.c_prime[0] >= 1.0 && plan.c_prime[0] <= 1.2);
    }

    #[test]
    fn paraboloid_plan_nests_node_by_node() {
        let spec = DomainSpec::paraboloid(2).unwrap();
        let v = [0.0, 0.0, 0.0, 1.0];
        let plan = build_exhaustion(&spec, &v, 2, 1.0, 0.25).unwrap();
        // Exhaustive scan over a lattice: slab nodes lie inside the ball and
        // ball nodes lie below the next cut.
        let h = 0.25;
        let lim = plan.c[1] + 0.5;
        let steps = (2.0 * lim / h) as i64;
        for a in 0..=steps {
            for b in 0..=steps {
                for cc in 0..=steps {
                    for d in 0..=steps {
                        let p = [
                            -lim + a as f64 * h,
                            -lim + b as f64 * h,
                            -lim + cc as f64 * h,
                            -lim + d as f64 * h,
                        ];
                        if spec.rho(&p) >= 0.0 {
                            continue;
                        }
                        let x1 = plan.x1(&p, 2);
                        let r = point::norm(&p, 4);
                        if x1 < plan.c_prime[0] {
                            assert!(r < plan.c[0], "slab node escapes ball");
                        }
                        if r < plan.c[0] {
                            assert!(x1 < plan.c_prime[1], "ball node escapes next slab");
                        }
                    }
                }
            }
        }
    }
}
