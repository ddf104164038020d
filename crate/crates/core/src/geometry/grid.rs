//! Uniform Cartesian lattices over R^{2n} with interior/boundary/exterior
//! masks and boundary nodes snapped onto the zero set of the defining
//! function.

use std::sync::Arc;

use crate::defaults::{PAD_CELLS, SNAP_TOL, TOL_GEOM};
use crate::geometry::domain::{PointClass, Region};
use crate::point;
use crate::{par, Error, Point, Result};

/// Node classification; same classes as pointwise classification.
pub type NodeClass = PointClass;

/// A uniform lattice. Node positions are `(origin_k + idx) * spacing`
/// componentwise, with `origin_k` in integer lattice units so that grids of
/// equal spacing share a global integer coordinate system exactly.
#[derive(Debug)]
pub struct Grid {
    pub n: usize,
    pub spacing: f64,
    pub origin_k: [i64; 4],
    pub dims: [usize; 4],
    /// True when the region carried a bounded spec or a truncation cut.
    pub bounded_region: bool,
    /// Smallest |grad rho| observed over sampled wall snaps: a degeneracy
    /// diagnostic for defining functions whose gradient collapses on the
    /// wall (such walls snap poorly at coarse spacing).
    pub min_boundary_gradient: f64,
    /// The generating region; solvers use it to bisect sample rays onto the wall.
    region: Region,
    mask: Vec<NodeClass>,
    interior: Vec<u32>,
    boundary: Vec<u32>,
    /// flat index -> ordinal in `boundary`, or -1.
    boundary_ord: Vec<i32>,
    /// Snapped position on `{rho = 0}`, per boundary ordinal.
    snap: Vec<Point>,
    /// Whether the snapped point binds a truncation cut (per boundary ordinal).
    on_cut: Vec<bool>,
}

impl Grid {
    pub fn rd(&self) -> usize {
        2 * self.n
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn strides(&self) -> [usize; 4] {
        [
            1,
            self.dims[0],
            self.dims[0] * self.dims[1],
            self.dims[0] * self.dims[1] * self.dims[2],
        ]
    }

    pub fn flat(&self, idx: [usize; 4]) -> usize {
        ((idx[3] * self.dims[2] + idx[2]) * self.dims[1] + idx[1]) * self.dims[0] + idx[0]
    }

    pub fn idx(&self, flat: usize) -> [usize; 4] {
        let i0 = flat % self.dims[0];
        let r0 = flat / self.dims[0];
        let i1 = r0 % self.dims[1];
        let r1 = r0 / self.dims[1];
        let i2 = r1 % self.dims[2];
        let i3 = r1 / self.dims[2];
        [i0, i1, i2, i3]
    }

    /// Lattice position of a node (ignores boundary snapping).
    pub fn lattice_pos(&self, flat: usize) -> Point {
        let idx = self.idx(flat);
        let mut p = point::ZERO;
        for k in 0..self.rd() {
            p[k] = (self.origin_k[k] + idx[k] as i64) as f64 * self.spacing;
        }
        p
    }

    /// Position of a node: snapped point for boundary nodes, lattice point
    /// otherwise.
    pub fn pos(&self, flat: usize) -> Point {
        let ord = self.boundary_ord[flat];
        if ord >= 0 {
            self.snap[ord as usize]
        } else {
            self.lattice_pos(flat)
        }
    }

    pub fn class(&self, flat: usize) -> NodeClass {
        self.mask[flat]
    }

    pub fn mask(&self) -> &[NodeClass] {
        &self.mask
    }

    pub fn interior(&self) -> &[u32] {
        &self.interior
    }

    pub fn boundary(&self) -> &[u32] {
        &self.boundary
    }

    pub fn boundary_ord(&self, flat: usize) -> Option<usize> {
        let o = self.boundary_ord[flat];
        (o >= 0).then_some(o as usize)
    }

    pub fn snap_of(&self, ord: usize) -> Point {
        self.snap[ord]
    }

    pub fn boundary_on_cut(&self, ord: usize) -> bool {
        self.on_cut[ord]
    }

    /// Integer lattice coordinate of a node in the global frame.
    pub fn global_coord(&self, flat: usize) -> [i64; 4] {
        let idx = self.idx(flat);
        let mut g = [0i64; 4];
        for k in 0..4 {
            g[k] = self.origin_k[k] + idx[k] as i64;
        }
        g
    }

    /// Flat index in this grid of a global lattice coordinate, when inside.
    pub fn flat_of_global(&self, g: [i64; 4]) -> Option<usize> {
        let mut idx = [0usize; 4];
        for k in 0..4 {
            let rel = g[k] - self.origin_k[k];
            if rel < 0 || rel >= self.dims[k] as i64 {
                return None;
            }
            idx[k] = rel as usize;
        }
        Some(self.flat(idx))
    }

    pub fn in_domain(&self, flat: usize) -> bool {
        self.mask[flat] != NodeClass::Exterior
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Crossing of the ray `z + t (p - z)`, `t > 0`, with the wall
    /// `{rho = 0}`, extended up to three sample lengths. `None` when the
    /// extended segment never leaves the region.
    pub fn ray_crossing(&self, z: &Point, p: &Point) -> Option<Point> {
        let dir = point::sub(p, z);
        let mut t_hi = None;
        for i in 1..=12 {
            let t = 0.25 * i as f64;
            if self.region.rho(&point::axpy(z, t, &dir)) > 0.0 {
                t_hi = Some(t);
                break;
            }
        }
        let hi0 = t_hi?;
        let mut lo = (hi0 - 0.25).max(0.0);
        let mut hi = hi0;
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if self.region.rho(&point::axpy(z, m, &dir)) > 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        Some(point::axpy(z, 0.5 * (lo + hi), &dir))
    }
}

/// Build a grid for `region` over `box2n` (one `[lo, hi]` per real axis)
/// at uniform `spacing`. The stored lattice is padded by a few exterior
/// cells so that wide stencils always index real storage.
pub fn build_grid(region: &Region, box2n: &[[f64; 2]], spacing: f64) -> Result<Arc<Grid>> {
    if spacing <= 0.0 || !spacing.is_finite() {
        return Err(Error::InvalidParams("spacing must be positive".into()));
    }
    let rd = region.rd();
    if box2n.len() != rd {
        return Err(Error::InvalidParams(format!(
            "box needs {} intervals, got {}",
            rd,
            box2n.len()
        )));
    }
    let mut origin_k = [0i64; 4];
    let mut dims = [1usize; 4];
    for k in 0..rd {
        let [lo, hi] = box2n[k];
        if !(hi > lo) {
            return Err(Error::InvalidParams("empty box interval".into()));
        }
        let lo_k = (lo / spacing).floor() as i64 - PAD_CELLS as i64;
        let hi_k = (hi / spacing).ceil() as i64 + PAD_CELLS as i64;
        origin_k[k] = lo_k;
        dims[k] = (hi_k - lo_k + 1) as usize;
    }
    let total: usize = dims.iter().product();
    if total > (1usize << 31) {
        return Err(Error::InvalidParams(format!(
            "grid of {total} nodes is too large"
        )));
    }

    let proto = Grid {
        n: region.n(),
        spacing,
        origin_k,
        dims,
        bounded_region: region.bounded(),
        min_boundary_gradient: f64::INFINITY,
        region: region.clone(),
        mask: Vec::new(),
        interior: Vec::new(),
        boundary: Vec::new(),
        boundary_ord: Vec::new(),
        snap: Vec::new(),
        on_cut: Vec::new(),
    };

    let band = TOL_GEOM * spacing;
    // First pass: interior mask from the sign of rho.
    let rho_at: Vec<f64> = par::map_indexed(total, |f| region.rho(&proto.lattice_pos(f)));
    for (f, r) in rho_at.iter().enumerate() {
        if r.is_nan() || *r == f64::INFINITY {
            return Err(Error::InvalidDomain(format!(
                "rho not finite at node {:?}",
                &proto.lattice_pos(f)[..rd]
            )));
        }
    }
    let interior_mask: Vec<bool> = par::map_indexed(total, |f| rho_at[f] < -band);

    // Reject interior nodes on the padded hull: the region must be bounded
    // inside the box (truncate unbounded domains with a cut).
    let hull_violation = (0..total).any(|f| {
        if !interior_mask[f] {
            return false;
        }
        let idx = proto.idx(f);
        (0..rd).any(|k| idx[k] == 0 || idx[k] + 1 == dims[k])
    });
    if hull_violation {
        return Err(Error::InvalidDomain(
            "domain reaches the grid hull; enlarge the box or add a truncation cut".into(),
        ));
    }

    // Moore-neighborhood offsets, axis neighbors first (fixed order).
    let strides = proto.strides();
    let mut axis_offsets: Vec<i64> = Vec::new();
    for k in 0..rd {
        axis_offsets.push(strides[k] as i64);
        axis_offsets.push(-(strides[k] as i64));
    }
    let mut moore: Vec<i64> = axis_offsets.clone();
    let widths = [
        if rd > 0 { 1i64 } else { 0 },
        if rd > 1 { 1 } else { 0 },
        if rd > 2 { 1 } else { 0 },
        if rd > 3 { 1 } else { 0 },
    ];
    for a in -widths[0]..=widths[0] {
        for b in -widths[1]..=widths[1] {
            for c in -widths[2]..=widths[2] {
                for d in -widths[3]..=widths[3] {
                    let off = a
                        + b * strides[1] as i64
                        + c * strides[2] as i64
                        + d * strides[3] as i64;
                    let l1 = a.abs() + b.abs() + c.abs() + d.abs();
                    if l1 > 1 && off != 0 {
                        moore.push(off);
                    }
                }
            }
        }
    }

    // Second pass: a non-interior node adjacent to an interior node becomes
    // a boundary node, snapped along the segment toward a reference interior
    // neighbor (axis directions take precedence). Among interior neighbors,
    // wall-deep ones (rho of the spec wall below the band) are preferred:
    // that choice does not depend on truncation cuts, so level grids of an
    // exhaustion snap shared wall nodes to identical points.
    let snap_tol = SNAP_TOL * spacing;
    let classify: Vec<(NodeClass, Point)> = par::map_indexed(total, |f| {
        if interior_mask[f] {
            return (NodeClass::Interior, point::ZERO);
        }
        let fi = f as i64;
        let interior_neighbors = || {
            moore
                .iter()
                .map(move |off| fi + off)
                .filter(|&g| g >= 0 && (g as usize) < total && interior_mask[g as usize])
        };
        let near = interior_neighbors()
            .find(|&g| region.rho_wall(&proto.lattice_pos(g as usize)) < -band)
            .or_else(|| interior_neighbors().next());
        let Some(g) = near else {
            return (NodeClass::Exterior, point::ZERO);
        };
        let p = proto.lattice_pos(f);
        if rho_at[f] <= 0.0 {
            // Inside the tolerance band but not interior: already on the wall.
            return (NodeClass::Boundary, p);
        }
        let q = proto.lattice_pos(g as usize);
        // rho(p) > 0 >= -band > rho(q): bisect for the crossing.
        let mut a = 0.0f64;
        let mut b = 1.0f64;
        let seg = point::dist(&p, &q, rd);
        while (b - a) * seg > snap_tol {
            let m = 0.5 * (a + b);
            let pm = point::axpy(&p, m, &point::sub(&q, &p));
            if region.rho(&pm) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let t = 0.5 * (a + b);
        (NodeClass::Boundary, point::axpy(&p, t, &point::sub(&q, &p)))
    });

    let mut mask = Vec::with_capacity(total);
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    let mut boundary_ord = vec![-1i32; total];
    let mut snap = Vec::new();
    let mut on_cut = Vec::new();
    for (f, (cls, sp)) in classify.iter().enumerate() {
        mask.push(*cls);
        match cls {
            NodeClass::Interior => interior.push(f as u32),
            NodeClass::Boundary => {
                boundary_ord[f] = boundary.len() as i32;
                boundary.push(f as u32);
                snap.push(*sp);
                // Band nodes snap to their own position slightly off the
                // zero set, so the flag compares which constraint is nearest
                // rather than thresholding the wall residual.
                on_cut.push(!region.nearest_is_wall(sp));
            }
            NodeClass::Exterior => {}
        }
    }
    if interior.is_empty() {
        return Err(Error::EmptyDiscretization);
    }

    // Gradient-degeneracy diagnostic over a deterministic snap subsample.
    let mut min_grad = f64::INFINITY;
    for (ord, s) in snap.iter().enumerate().step_by(7) {
        if on_cut[ord] {
            continue;
        }
        let g = region.spec.grad_rho(s, 1e-6 * spacing.max(1e-6));
        min_grad = min_grad.min(point::norm(&g, rd));
    }

    Ok(Arc::new(Grid {
        mask,
        interior,
        boundary,
        boundary_ord,
        snap,
        on_cut,
        min_boundary_gradient: min_grad,
        ..proto
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::domain::DomainSpec;

    fn disc_region() -> Region {
        Region::from_spec(DomainSpec::ball(1, &[0.0, 0.0], 1.0).unwrap())
    }

    #[test]
    fn interior_count_matches_independent_scan() {
        let region = disc_region();
        let h = 0.1;
        let grid = build_grid(&region, &[[-1.2, 1.2], [-1.2, 1.2]], h).unwrap();
        // Independent lattice scan over the same padded index space.
        let mut count = 0usize;
        for f in 0..grid.len() {
            let p = grid.lattice_pos(f);
            if region.rho(&p) < -TOL_GEOM * h {
                count += 1;
            }
        }
        assert_eq!(grid.interior().len(), count);
        assert!(count > 0);
    }

    #[test]
    fn empty_box_is_rejected() {
        let region = disc_region();
        let err = build_grid(&region, &[[2.0, 3.0], [2.0, 3.0]], 0.1).unwrap_err();
        assert!(matches!(err, Error::EmptyDiscretization));
    }

    #[test]
    fn boundary_nodes_sit_on_the_zero_set() {
        let region = disc_region();
        let grid = build_grid(&region, &[[-1.2, 1.2], [-1.2, 1.2]], 0.1).unwrap();
        assert!(!grid.boundary().is_empty());
        for (ord, _) in grid.boundary().iter().enumerate() {
            let s = grid.snap_of(ord);
            assert!(region.rho(&s).abs() <= 0.5 * 0.1 + 1e-12);
        }
    }

    #[test]
    fn paraboloid_boundary_residuals_are_small() {
        let spec = DomainSpec::paraboloid(2).unwrap();
        let region = Region::from_spec(spec).with_ball_cut([0.0, 0.0, 0.0, 1.0], 1.4);
        let h = 0.25;
        let grid = build_grid(
            &region,
            &[[-1.5, 1.5], [-1.5, 1.5], [-1.5, 1.5], [-0.5, 2.5]],
            h,
        )
        .unwrap();
        let mut on_wall = 0;
        let mut bisected = 0;
        for (ord, &bf) in grid.boundary().iter().enumerate() {
            if grid.boundary_on_cut(ord) {
                continue;
            }
            on_wall += 1;
            let s = grid.snap_of(ord);
            // Residual of Im w - |z|^2 - (Re w)^2 at the snapped point. Band
            // nodes keep their own (in-band) position, so the bound is the
            // classification band; nodes snapped by bisection sit on the
            // wall to the bisection tolerance.
            let res = (s[3] - (s[0] * s[0] + s[1] * s[1] + s[2] * s[2])).abs();
            assert!(res <= 0.5 * h + 1e-12, "residual {res} too large");
            let lattice = grid.lattice_pos(bf as usize);
            if lattice != s {
                assert!(res <= 1e-8, "bisected residual {res} too large");
                bisected += 1;
            }
        }
        assert!(on_wall > 0 && bisected > 0);
        // The paraboloid wall has |grad rho| >= 1 everywhere.
        assert!(grid.min_boundary_gradient >= 1.0 - 1e-6);
    }

    #[test]
    fn interior_nodes_have_all_axis_neighbors_in_mask() {
        let region = disc_region();
        let grid = build_grid(&region, &[[-1.2, 1.2], [-1.2, 1.2]], 0.1).unwrap();
        let strides = grid.strides();
        for &f in grid.interior() {
            let f = f as usize;
            for k in 0..grid.rd() {
                assert!(f >= strides[k] && f + strides[k] < grid.len());
                // Every axis neighbor of an interior node is interior or boundary.
                assert_ne!(grid.class(f + strides[k]), NodeClass::Exterior);
                assert_ne!(grid.class(f - strides[k]), NodeClass::Exterior);
            }
        }
    }

    #[test]
    fn mask_partition_is_total() {
        let region = disc_region();
        let grid = build_grid(&region, &[[-1.2, 1.2], [-1.2, 1.2]], 0.1).unwrap();
        let mut counts = [0usize; 3];
        for f in 0..grid.len() {
            counts[grid.class(f) as usize] += 1;
        }
        assert_eq!(counts.iter().sum::<usize>(), grid.len());
        assert_eq!(counts[0], grid.interior().len());
        assert_eq!(counts[1], grid.boundary().len());
    }
}
