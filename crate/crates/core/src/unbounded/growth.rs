//! Growth profiles: the running maximum of the boundary data over wall
//! points below a frame coordinate, `g(x) = max { h(z) : x1(z) <= x }`.

use serde::{Deserialize, Serialize};

use crate::field::BoundaryTrace;
use crate::geometry::Grid;
use crate::point;
use crate::{Error, Point, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub xs: Vec<f64>,
    pub g: Vec<f64>,
}

impl GrowthProfile {
    pub fn max_g(&self) -> f64 {
        self.g.iter().copied().fold(0.0, f64::max)
    }

    /// Index range of the last quartile (at least four points).
    pub fn tail_range(&self) -> Result<std::ops::Range<usize>> {
        let len = self.xs.len();
        let start = (3 * len) / 4;
        if len < 8 || len - start < 4 {
            return Err(Error::InsufficientTail);
        }
        Ok(start..len)
    }
}

fn validate_xs(xs: &[f64]) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::InsufficientTail);
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("xs must be strictly increasing".into()));
    }
    Ok(())
}

/// Profile scanned from the wall nodes of a grid: for each requested `x`,
/// the maximum of the trace over wall boundary nodes with frame coordinate
/// `x1(snap) <= x`. Nodes on truncation cuts are excluded.
pub fn growth_profile(
    grid: &Grid,
    trace: &BoundaryTrace,
    v: &Point,
    xs: &[f64],
) -> Result<GrowthProfile> {
    validate_xs(xs)?;
    let n = grid.n;
    let mut samples: Vec<(f64, f64)> = (0..grid.boundary().len())
        .filter(|&ord| !grid.boundary_on_cut(ord))
        .map(|ord| (point::re_inner(&grid.snap_of(ord), v, n), trace.get(ord)))
        .collect();
    if samples.is_empty() {
        return Err(Error::EmptyPrefix { x: xs[0] });
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut g = Vec::with_capacity(xs.len());
    let mut cursor = 0usize;
    let mut running = f64::NEG_INFINITY;
    for &x in xs {
        while cursor < samples.len() && samples[cursor].0 <= x {
            running = running.max(samples[cursor].1);
            cursor += 1;
        }
        if running == f64::NEG_INFINITY {
            return Err(Error::EmptyPrefix { x });
        }
        g.push(running);
    }
    Ok(GrowthProfile { xs: xs.to_vec(), g })
}

/// Synthetic profile from a closed form; the running maximum is enforced.
pub fn synthetic_profile(xs: &[f64], f: impl Fn(f64) -> f64) -> Result<GrowthProfile> {
    validate_xs(xs)?;
    let mut g = Vec::with_capacity(xs.len());
    let mut running = f64::NEG_INFINITY;
    for &x in xs {
        running = running.max(f(x));
        g.push(running);
    }
    if g.iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidParams("growth profile must be >= 0".into()));
    }
    Ok(GrowthProfile { xs: xs.to_vec(), g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, DomainSpec, Region};

    fn truncated_halfplane() -> (std::sync::Arc<Grid>, Region) {
        let spec = DomainSpec::halfspace(1, &[1.0, 0.0], 0.0).unwrap();
        let region = Region::from_spec(spec).with_ball_cut([0.0; 4], 3.0);
        let grid = build_grid(&region, &[[-0.5, 3.2], [-3.2, 3.2]], 0.05).unwrap();
        (grid, region)
    }

    #[test]
    fn constant_trace_gives_constant_profile() {
        let (grid, _) = truncated_halfplane();
        let trace = BoundaryTrace::from_fn(grid.clone(), |_| 1.0).unwrap();
        let xs: Vec<f64> = (0..20).map(|k| 0.2 + 0.1 * k as f64).collect();
        let prof = growth_profile(&grid, &trace, &[1.0, 0.0, 0.0, 0.0], &xs).unwrap();
        assert!(prof.g.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn clipped_frame_coordinate_profile_matches_direct_scan() {
        // Recession along the wall: v = (0, 1) (i in C^1), so the frame
        // coordinate on the wall {Re z = 0} is y1 and ranges freely.
        let (grid, _) = truncated_halfplane();
        let trace = BoundaryTrace::from_fn(grid.clone(), |p| p[1].max(0.0)).unwrap();
        let v = [0.0, 1.0, 0.0, 0.0];
        let xs: Vec<f64> = (0..24).map(|k| 0.1 + 0.1 * k as f64).collect();
        let prof = growth_profile(&grid, &trace, &v, &xs).unwrap();
        // Independent scan oracle over wall nodes.
        for (i, &x) in xs.iter().enumerate() {
            let mut oracle = f64::NEG_INFINITY;
            for ord in 0..grid.boundary().len() {
                if grid.boundary_on_cut(ord) {
                    continue;
                }
                let s = grid.snap_of(ord);
                if s[1] <= x {
                    oracle = oracle.max(s[1].max(0.0));
                }
            }
            assert_eq!(prof.g[i], oracle);
            // g(x) = max(x, 0) within node granularity.
            assert!((prof.g[i] - x.max(0.0)).abs() <= 0.06, "g({x}) = {}", prof.g[i]);
        }
    }

    #[test]
    fn peaked_trace_profile_freezes_after_the_peak() {
        let xs: Vec<f64> = (0..40).map(|k| 0.1 * k as f64).collect();
        let prof = synthetic_profile(&xs, |x| 1.0 / (1.0 + (x - 1.3) * (x - 1.3))).unwrap();
        let peak = prof.max_g();
        assert!((peak - 1.0).abs() < 0.01);
        // Constant once the global max is passed.
        let after: Vec<f64> = prof
            .xs
            .iter()
            .zip(&prof.g)
            .filter(|(x, _)| **x > 1.4)
            .map(|(_, g)| *g)
            .collect();
        assert!(after.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn prefix_below_the_wall_is_an_error() {
        let (grid, _) = truncated_halfplane();
        let trace = BoundaryTrace::from_fn(grid.clone(), |_| 1.0).unwrap();
        let err = growth_profile(&grid, &trace, &[1.0, 0.0, 0.0, 0.0], &[-5.0, -4.0]).unwrap_err();
        assert!(matches!(err, Error::EmptyPrefix { .. }));
    }
}
