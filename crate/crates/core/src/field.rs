//! Real scalar fields on grid nodes and boundary traces.

use std::sync::Arc;

use crate::geometry::{Grid, NodeClass};
use crate::{Error, Point, Result};

/// Closed-form evaluator attached to a trace for off-node boundary queries
/// (circle samples clamped to the wall, patched partitions, ...).
pub type TraceFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Real values on the nodes of a grid; finite on interior and boundary
/// nodes, NaN sentinel elsewhere.
#[derive(Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    /// Constant `c` on interior and boundary nodes.
    pub fn constant(grid: Arc<Grid>, c: f64) -> Self {
        let values = (0..grid.len())
            .map(|f| {
                if grid.class(f) == NodeClass::Exterior {
                    f64::NAN
                } else {
                    c
                }
            })
            .collect();
        ScalarField { grid, values }
    }

    /// Evaluate `f` at node positions (snapped positions for boundary nodes).
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&Point) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                if grid.class(i) == NodeClass::Exterior {
                    f64::NAN
                } else {
                    f(&grid.pos(i))
                }
            })
            .collect();
        ScalarField { grid, values }
    }

    /// Evaluate `f` at lattice positions on every node, including exterior
    /// ones. Used by finite-difference probes of closed-form fields.
    pub fn from_fn_lattice(grid: Arc<Grid>, f: impl Fn(&Point) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.lattice_pos(i))).collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    pub fn set(&mut self, flat: usize, v: f64) {
        self.values[flat] = v;
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.dims == other.grid.dims
                && self.grid.origin_k == other.grid.origin_k
                && self.grid.spacing == other.grid.spacing)
    }

    /// Sup-norm difference over interior and boundary nodes.
    pub fn sup_diff(&self, other: &ScalarField) -> f64 {
        assert!(self.same_grid(other), "fields live on different grids");
        let mut m: f64 = 0.0;
        for f in 0..self.grid.len() {
            if self.grid.in_domain(f) {
                m = m.max((self.values[f] - other.values[f]).abs());
            }
        }
        m
    }

    /// Sup-norm difference over interior nodes only (boundary nodes carry
    /// pinned trace values by definition).
    pub fn sup_diff_interior(&self, other: &ScalarField) -> f64 {
        assert!(self.same_grid(other), "fields live on different grids");
        let mut m: f64 = 0.0;
        for &f in self.grid.interior() {
            let f = f as usize;
            m = m.max((self.values[f] - other.values[f]).abs());
        }
        m
    }

    /// Max over interior and boundary nodes.
    pub fn max_in_domain(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for f in 0..self.grid.len() {
            if self.grid.in_domain(f) {
                m = m.max(self.values[f]);
            }
        }
        m
    }

    pub fn min_in_domain(&self) -> f64 {
        let mut m = f64::INFINITY;
        for f in 0..self.grid.len() {
            if self.grid.in_domain(f) {
                m = m.min(self.values[f]);
            }
        }
        m
    }

    /// Map values through `g` on in-domain nodes.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> ScalarField {
        let values = (0..self.grid.len())
            .map(|f| {
                if self.grid.in_domain(f) {
                    g(self.values[f])
                } else {
                    f64::NAN
                }
            })
            .collect();
        ScalarField {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn negate(&self) -> ScalarField {
        self.map(|v| -v)
    }
}

/// Boundary data: one value per boundary node, evaluated at the snapped
/// position, plus an optional closed-form evaluator for off-node queries.
#[derive(Clone)]
pub struct BoundaryTrace {
    grid: Arc<Grid>,
    values: Vec<f64>,
    eval: Option<TraceFn>,
    signed: bool,
}

impl BoundaryTrace {
    /// Non-negative trace from node values; errors on a negative entry.
    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        assert_eq!(values.len(), grid.boundary().len());
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeTrace { node, value });
        }
        Ok(BoundaryTrace {
            grid,
            values,
            eval: None,
            signed: false,
        })
    }

    /// Non-negative trace from a closed form; errors on a negative sample.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let values: Vec<f64> = (0..grid.boundary().len())
            .map(|ord| f(&grid.snap_of(ord)))
            .collect();
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeTrace { node, value });
        }
        Ok(BoundaryTrace {
            grid,
            values,
            eval: Some(Arc::new(f)),
            signed: false,
        })
    }

    /// Signed trace; the escape hatch works on bounded grids only.
    pub fn signed_from_fn(
        grid: Arc<Grid>,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !grid.bounded_region {
            let bad = (0..grid.boundary().len())
                .map(|ord| f(&grid.snap_of(ord)))
                .enumerate()
                .find(|(_, v)| *v < 0.0);
            if let Some((node, value)) = bad {
                return Err(Error::NegativeTrace { node, value });
            }
        }
        let values = (0..grid.boundary().len())
            .map(|ord| f(&grid.snap_of(ord)))
            .collect();
        Ok(BoundaryTrace {
            grid,
            values,
            eval: Some(Arc::new(f)),
            signed: true,
        })
    }

    /// Trace carrying the boundary-node values of an existing field (signed);
    /// used to certify computed fields against their own boundary data.
    pub fn from_field(field: &ScalarField) -> Self {
        let grid = field.grid().clone();
        let values = grid
            .boundary()
            .iter()
            .map(|&f| field.get(f as usize))
            .collect();
        BoundaryTrace {
            grid,
            values,
            eval: None,
            signed: true,
        }
    }

    pub fn signed_from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        assert_eq!(values.len(), grid.boundary().len());
        if !grid.bounded_region {
            if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
                return Err(Error::NegativeTrace { node, value });
            }
        }
        Ok(BoundaryTrace {
            grid,
            values,
            eval: None,
            signed: true,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, ord: usize) -> f64 {
        self.values[ord]
    }

    pub fn signed(&self) -> bool {
        self.signed
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn range(&self) -> f64 {
        (self.max() - self.min()).max(0.0)
    }

    /// Closed-form value at an arbitrary point, when an evaluator exists.
    pub fn eval_at(&self, p: &Point) -> Option<f64> {
        self.eval.as_ref().map(|f| f(p))
    }

    /// Attach (or replace) the off-node evaluator.
    pub fn set_eval(&mut self, f: TraceFn) {
        self.eval = Some(f);
    }

    /// Value at an arbitrary wall point: the closed form when present,
    /// otherwise the value of the nearest boundary node.
    pub fn at_wall_point(&self, p: &Point) -> f64 {
        if let Some(f) = &self.eval {
            return f(p);
        }
        let rd = self.grid.rd();
        let mut best = f64::INFINITY;
        let mut val = 0.0;
        for ord in 0..self.values.len() {
            let s = self.grid.snap_of(ord);
            let d = crate::point::dist(&s, p, rd);
            if d < best {
                best = d;
                val = self.values[ord];
            }
        }
        val
    }

    /// Shift every value by `c` (keeps the evaluator consistent).
    pub fn shift(&self, c: f64) -> BoundaryTrace {
        let eval = self.eval.clone().map(|f| {
            let g: TraceFn = Arc::new(move |p: &Point| f(p) + c);
            g
        });
        BoundaryTrace {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
            eval,
            signed: true,
        }
    }

    pub fn negate(&self) -> BoundaryTrace {
        let eval = self.eval.clone().map(|f| {
            let g: TraceFn = Arc::new(move |p: &Point| -f(p));
            g
        });
        BoundaryTrace {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| -v).collect(),
            eval,
            signed: true,
        }
    }

    /// Affine blend `(1 - t) self + t other` on the same grid.
    pub fn blend(&self, other: &BoundaryTrace, t: f64) -> BoundaryTrace {
        assert_eq!(self.values.len(), other.values.len());
        let eval = match (self.eval.clone(), other.eval.clone()) {
            (Some(f), Some(g)) => {
                let h: TraceFn = Arc::new(move |p: &Point| (1.0 - t) * f(p) + t * g(p));
                Some(h)
            }
            _ => None,
        };
        BoundaryTrace {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect(),
            eval,
            signed: self.signed || other.signed,
        }
    }

    /// Pointwise max of two traces on the same grid.
    pub fn max_with(&self, other: &BoundaryTrace) -> BoundaryTrace {
        assert_eq!(self.values.len(), other.values.len());
        let eval = match (self.eval.clone(), other.eval.clone()) {
            (Some(f), Some(g)) => {
                let h: TraceFn = Arc::new(move |p: &Point| f(p).max(g(p)));
                Some(h)
            }
            _ => None,
        };
        BoundaryTrace {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.max(*b))
                .collect(),
            eval,
            signed: self.signed || other.signed,
        }
    }
}
