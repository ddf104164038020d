//! Discrete Levi spectra: the complex Hessian assembled from centered
//! second differences on the real lattice.
//!
//! With `z_j = x_j + i y_j`,
//! `d2/dz_j dzbar_j = (1/4)(d2/dx_j^2 + d2/dy_j^2)` and, for j != k,
//! `d2/dz_j dzbar_k = (1/4)[(u_{x_j x_k} + u_{y_j y_k}) + i (u_{x_j y_k} - u_{y_j x_k})]`.
//! Mixed terms use 4-point cross stencils; everything is O(spacing^2).

use crate::field::ScalarField;
use crate::geometry::NodeClass;
use crate::{Error, Result};

fn second_diff(field: &ScalarField, f: usize, stride: usize) -> f64 {
    let h = field.grid().spacing;
    (field.get(f + stride) - 2.0 * field.get(f) + field.get(f - stride)) / (h * h)
}

fn cross_diff(field: &ScalarField, f: usize, sa: usize, sb: usize) -> f64 {
    let h = field.grid().spacing;
    (field.get(f + sa + sb) - field.get(f + sa - sb) - field.get(f - sa + sb)
        + field.get(f - sa - sb))
        / (4.0 * h * h)
}

/// The n x n Hermitian Levi matrix at an interior node, packed as
/// `(diag, off)` with `off = (re, im)` of the (1,2) entry for n = 2.
pub fn levi_matrix(field: &ScalarField, node: usize) -> Result<(Vec<f64>, Option<(f64, f64)>)> {
    let grid = field.grid().clone();
    let n = grid.n;
    let strides = grid.strides();
    // The stencil needs a full 2-cell neighborhood of non-exterior nodes.
    let idx = grid.idx(node);
    for k in 0..grid.rd() {
        if idx[k] < 2 || idx[k] + 2 >= grid.dims[k] {
            return Err(Error::StencilOutOfDomain);
        }
    }
    let mut offsets = Vec::new();
    let lim = |k: usize| if k < grid.rd() { 2i64 } else { 0 };
    for a in -lim(0)..=lim(0) {
        for b in -lim(1)..=lim(1) {
            for c in -lim(2)..=lim(2) {
                for d in -lim(3)..=lim(3) {
                    offsets.push(
                        a + b * strides[1] as i64 + c * strides[2] as i64 + d * strides[3] as i64,
                    );
                }
            }
        }
    }
    for off in offsets {
        let g = node as i64 + off;
        if g < 0
            || g as usize >= grid.len()
            || grid.class(g as usize) == NodeClass::Exterior
            || !field.get(g as usize).is_finite()
        {
            return Err(Error::StencilOutOfDomain);
        }
    }

    let mut diag = Vec::with_capacity(n);
    for j in 0..n {
        let sx = strides[2 * j];
        let sy = strides[2 * j + 1];
        diag.push(0.25 * (second_diff(field, node, sx) + second_diff(field, node, sy)));
    }
    let off = if n == 2 {
        let (sx1, sy1, sx2, sy2) = (strides[0], strides[1], strides[2], strides[3]);
        let re = 0.25 * (cross_diff(field, node, sx1, sx2) + cross_diff(field, node, sy1, sy2));
        let im = 0.25 * (cross_diff(field, node, sx1, sy2) - cross_diff(field, node, sy1, sx2));
        Some((re, im))
    } else {
        None
    };
    Ok((diag, off))
}

/// Eigenvalues of the discrete Levi form at an interior node, ascending.
pub fn discrete_levi_spectrum(field: &ScalarField, node: usize) -> Result<Vec<f64>> {
    let (diag, off) = levi_matrix(field, node)?;
    match off {
        None => Ok(vec![diag[0]]),
        Some((re, im)) => {
            let (a, b) = (diag[0], diag[1]);
            let mid = 0.5 * (a + b);
            let rad = (0.25 * (a - b) * (a - b) + re * re + im * im).sqrt();
            Ok(vec![mid - rad, mid + rad])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, DomainSpec, Grid, Region};
    use std::sync::Arc;

    fn ball_grid(h: f64) -> Arc<Grid> {
        let region = Region::from_spec(DomainSpec::ball(2, &[0.0; 4], 1.0).unwrap());
        build_grid(&region, &[[-1.1, 1.1]; 4], h).unwrap()
    }

    #[test]
    fn quadratic_model_spectra() {
        let grid = ball_grid(0.2);
        let node = grid.flat_of_global([0, 0, 0, 0]).unwrap();

        let z1sq = ScalarField::from_fn_lattice(grid.clone(), |p| p[0] * p[0] + p[1] * p[1]);
        let s = discrete_levi_spectrum(&z1sq, node).unwrap();
        assert!((s[0] - 0.0).abs() < 1e-10 && (s[1] - 1.0).abs() < 1e-10, "{s:?}");

        let re_z1sq = ScalarField::from_fn_lattice(grid.clone(), |p| p[0] * p[0] - p[1] * p[1]);
        let s = discrete_levi_spectrum(&re_z1sq, node).unwrap();
        assert!(s[0].abs() < 1e-10 && s[1].abs() < 1e-10, "{s:?}");

        let normsq = ScalarField::from_fn_lattice(grid.clone(), |p| {
            p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]
        });
        let s = discrete_levi_spectrum(&normsq, node).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-10 && (s[1] - 1.0).abs() < 1e-10, "{s:?}");
    }

    #[test]
    fn mixed_term_field_matches_analytic_eigenvalues() {
        // u = x1 y2 has d2/dz1 dzbar2 = i/4 and zero diagonal; eigenvalues
        // are +-1/4.
        let grid = ball_grid(0.2);
        let node = grid.flat_of_global([1, -1, 0, 1]).unwrap();
        let field = ScalarField::from_fn_lattice(grid.clone(), |p| p[0] * p[3]);
        let s = discrete_levi_spectrum(&field, node).unwrap();
        assert!((s[0] + 0.25).abs() < 1e-10 && (s[1] - 0.25).abs() < 1e-10, "{s:?}");
    }

    #[test]
    fn spectrum_converges_at_second_order() {
        // Smooth non-quadratic field: u = |z1|^4 + x1 y2.
        // Levi matrix at p: diag(4 |z1|^2, 0), off = i/4.
        let f = |p: &crate::Point| {
            let r2 = p[0] * p[0] + p[1] * p[1];
            r2 * r2 + p[0] * p[3]
        };
        let at = [0.3, 0.1, -0.2, 0.4];
        let exact = {
            let r2 = at[0] * at[0] + at[1] * at[1];
            let (a, b) = (4.0 * r2, 0.0);
            let mid = 0.5 * (a + b);
            let rad = (0.25 * (a - b) * (a - b) + 0.0625f64).sqrt();
            [mid - rad, mid + rad]
        };
        let mut errs = Vec::new();
        for h in [0.1, 0.05] {
            let grid = ball_grid(h);
            let gc: Vec<i64> = at.iter().map(|c| (c / h).round() as i64).collect();
            let node = grid.flat_of_global([gc[0], gc[1], gc[2], gc[3]]).unwrap();
            // Evaluate at the actual lattice point nearest to `at`.
            let p = grid.lattice_pos(node);
            let exact_here = {
                let r2 = p[0] * p[0] + p[1] * p[1];
                let (a, b) = (4.0 * r2, 0.0);
                let mid = 0.5 * (a + b);
                let rad = (0.25 * (a - b) * (a - b) + 0.0625f64).sqrt();
                [mid - rad, mid + rad]
            };
            let field = ScalarField::from_fn_lattice(grid.clone(), f);
            let s = discrete_levi_spectrum(&field, node).unwrap();
            let e = (s[0] - exact_here[0]).abs().max((s[1] - exact_here[1]).abs());
            errs.push(e);
        }
        let _ = exact;
        let order = (errs[0] / errs[1]).log2();
        assert!(order >= 1.5, "convergence order {order} (errors {errs:?})");
    }

    #[test]
    fn stencil_requires_a_two_cell_interior_neighborhood() {
        let grid = ball_grid(0.2);
        // A node hugging the wall lacks the neighborhood.
        let near_wall = *grid
            .interior()
            .iter()
            .max_by(|&&a, &&b| {
                let ra = crate::point::norm(&grid.lattice_pos(a as usize), 4);
                let rb = crate::point::norm(&grid.lattice_pos(b as usize), 4);
                ra.total_cmp(&rb)
            })
            .unwrap() as usize;
        let field = ScalarField::from_fn_lattice(grid.clone(), |p| p[0]);
        assert!(matches!(
            discrete_levi_spectrum(&field, near_wall),
            Err(Error::StencilOutOfDomain)
        ));
    }
}
