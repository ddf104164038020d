//! Perron-Bremermann envelopes on bounded discretized domains.
//!
//! The discrete surrogate for "plurisubharmonic" is the sub-mean-value
//! inequality along finitely many sampled complex lines: at an interior node
//! `z`, for every sampled unit direction `a`,
//! `u(z) <= mean_theta u(z + delta e^{i theta} a)`.
//! The envelope of boundary data `h` is the fixed point of the monotone
//! Jacobi sweep `u <- min(u, min_a mean_a(u))` started from the constant
//! upper bound `max h`, with boundary nodes pinned to `h`. Off-node circle
//! values use multilinear interpolation; samples whose interpolation cell
//! leaves the domain are clamped to the wall value at the crossing of the
//! sample ray with `{rho = 0}`, which keeps the scheme monotone.
//!
//! The q-plurisubharmonic generalization replaces `min_a` by
//! `min_frames max_{a in frame}`; for q = 0 frames are single lines and the
//! rule reduces to the psh sweep, while q = n-1 in C^2 has the full space as
//! its only frame, giving `min(u, max_a mean_a(u))`.

pub mod glue;
pub mod harmonic;
pub mod lipschitz;
pub mod properties;
pub mod slice;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::field::{BoundaryTrace, ScalarField};
use crate::geometry::{Grid, NodeClass};
use crate::point;
use crate::{par, Error, Point, Result};

/// Sweep configuration. `delta_cells` is the circle radius in cells.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvelopeConfig {
    /// Sampled complex directions; 0 selects the per-dimension default
    /// (8 for n = 1, 24 for n = 2).
    pub directions: usize,
    pub quad_points: usize,
    pub delta_cells: f64,
    /// Absolute stopping tolerance; `None` selects `1e-8 * (trace range + 1)`.
    pub tol_iter: Option<f64>,
    pub max_iter: usize,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig {
            directions: 0,
            quad_points: defaults::QUAD_POINTS,
            delta_cells: defaults::DELTA_CELLS,
            tol_iter: None,
            max_iter: defaults::MAX_ITER,
        }
    }
}

impl EnvelopeConfig {
    pub fn for_dim(n: usize) -> Self {
        EnvelopeConfig {
            directions: if n == 1 {
                defaults::DIRECTIONS_N1
            } else {
                defaults::DIRECTIONS_N2
            },
            ..Default::default()
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol_iter = Some(tol);
        self
    }

    fn resolved_directions(&self, n: usize) -> usize {
        if self.directions == 0 {
            if n == 1 {
                defaults::DIRECTIONS_N1
            } else {
                defaults::DIRECTIONS_N2
            }
        } else {
            self.directions
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let dirs = self.resolved_directions(n);
        if dirs < 2 * n || dirs > 64 {
            return Err(Error::InvalidParams(format!(
                "directions must lie in [{}, 64] for n = {n}",
                2 * n
            )));
        }
        if self.quad_points < 8 {
            return Err(Error::InvalidParams("quad_points must be >= 8".into()));
        }
        if !(1.0..=3.0).contains(&self.delta_cells) {
            return Err(Error::InvalidParams("delta must lie in [1, 3] cells".into()));
        }
        if let Some(t) = self.tol_iter {
            if !(t > 0.0) {
                return Err(Error::InvalidParams("tol_iter must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn effective_tol(&self, trace_range: f64) -> f64 {
        self.tol_iter
            .unwrap_or(defaults::TOL_ITER_FACTOR * (trace_range + 1.0))
    }
}

/// One interpolation stencil: cell corners as flat-index offsets plus
/// multilinear weights (near-zero corners dropped, weights renormalized).
#[derive(Clone, Debug)]
struct Stencil {
    offsets: Vec<i32>,
    weights: Vec<f64>,
}

/// Precomputed sweep data for one (grid, trace, cfg) triple.
///
/// Circle samples are gathered in opposite pairs `(theta, theta + pi)`.
/// A pair whose samples both interpolate from in-domain cells contributes
/// the plain two-sample average. When a side exits the domain, its arm is
/// shortened to the wall crossing of the sample ray, the value there is the
/// trace, and the pair is reweighted `s_minus : s_plus` (the unequal-arm
/// second difference weights), which keeps the scheme monotone and
/// second-order consistent at curved walls. Interpolation cells are
/// all-interior, so no value is ever read across the wall; wall data enters
/// only through exact trace values at exact crossing points.
pub struct SweepPlan {
    grid: Arc<Grid>,
    pub dirs: Vec<Point>,
    pub quad: usize,
    pub delta_abs: f64,
    pub tol_iter: f64,
    pub max_iter: usize,
    /// `d * quad + t` indexed full-radius interpolation stencils.
    stencils: Vec<Stencil>,
    /// Per interior ordinal: range into the pair fixups.
    fix_start: Vec<u32>,
    /// Fixed pairs keyed by `d * (quad/2) + t`, sorted per node.
    fix_key: Vec<u16>,
    /// Weight of the positive side; the negative side gets `1 - w`.
    fix_wplus: Vec<f64>,
    /// Pinned wall values; NaN means "gather from the stencil".
    fix_vplus: Vec<f64>,
    fix_vminus: Vec<f64>,
    trace_values: Vec<f64>,
    init_value: f64,
}

/// Result of an envelope solve.
pub struct EnvelopeRun {
    pub field: ScalarField,
    pub sweeps: usize,
    pub final_change: f64,
    pub tol_iter: f64,
}

/// Frame sets for the q-psh sweep: indices into the direction list.
#[derive(Clone, Debug)]
pub struct FrameSet {
    pub frames: Vec<Vec<usize>>,
}

/// Deterministic frames of (q+1)-dimensional complex planes. For q = 0
/// every sampled line is its own frame; for q = n-1 in C^2 the full space is
/// the single frame containing all directions.
pub fn frames_for(n: usize, q: usize, dirs: usize) -> Result<FrameSet> {
    if q >= n {
        return Err(Error::InvalidQ { q, n });
    }
    if q == 0 {
        Ok(FrameSet {
            frames: (0..dirs).map(|d| vec![d]).collect(),
        })
    } else {
        Ok(FrameSet {
            frames: vec![(0..dirs).collect()],
        })
    }
}

/// Approximate nearest-boundary-node lookup by expanding index cubes.
pub(crate) struct BoundaryIndex<'g> {
    pub grid: &'g Grid,
}

impl<'g> BoundaryIndex<'g> {
    pub fn nearest(&self, p: &Point) -> Option<usize> {
        let g = self.grid;
        let rd = g.rd();
        let h = g.spacing;
        let mut base = [0i64; 4];
        for k in 0..rd {
            base[k] = (p[k] / h).floor() as i64;
        }
        for radius in 1..=4i64 {
            let mut best: Option<(f64, usize)> = None;
            let lim = |k: usize| if k < rd { radius } else { 0 };
            for a in -lim(0)..=lim(0) {
                for b in -lim(1)..=lim(1) {
                    for c in -lim(2)..=lim(2) {
                        for d in -lim(3)..=lim(3) {
                            let gc = [base[0] + a, base[1] + b, base[2] + c, base[3] + d];
                            let Some(f) = g.flat_of_global(gc) else {
                                continue;
                            };
                            if let Some(ord) = g.boundary_ord(f) {
                                let s = g.snap_of(ord);
                                let dd = point::dist(&s, p, rd);
                                if best.map_or(true, |(bd, _)| dd < bd) {
                                    best = Some((dd, ord));
                                }
                            }
                        }
                    }
                }
            }
            if let Some((_, ord)) = best {
                return Some(ord);
            }
        }
        None
    }
}

impl SweepPlan {
    /// Precompute stencils and pinned samples for `grid` + `trace`.
    pub fn build(
        grid: Arc<Grid>,
        trace: &BoundaryTrace,
        cfg: &EnvelopeConfig,
    ) -> Result<SweepPlan> {
        let n = grid.n;
        cfg.validate(n)?;
        if trace.min() < 0.0 && !trace.signed() {
            let node = trace
                .values()
                .iter()
                .position(|v| *v < 0.0)
                .unwrap_or_default();
            return Err(Error::NegativeTrace {
                node,
                value: trace.values()[node],
            });
        }
        let rd = grid.rd();
        let h = grid.spacing;
        let delta_abs = cfg.delta_cells * h;
        let quad = cfg.quad_points;
        let ndirs = cfg.resolved_directions(n);
        // In C^1 all unit directions trace the same circle; when the angular
        // increment pi/ndirs is a multiple of the quadrature step 2 pi/quad
        // the sampled point sets coincide exactly and one line suffices.
        let dirs: Vec<Point> = if n == 1 && quad % (2 * ndirs) == 0 {
            vec![[1.0, 0.0, 0.0, 0.0]]
        } else {
            point::complex_directions(n, ndirs)
        };

        if quad % 2 != 0 {
            return Err(Error::InvalidParams(
                "quad_points must be even (samples pair across the circle)".into(),
            ));
        }
        let strides = grid.strides();
        let corners = 1usize << rd;

        let mut stencils = Vec::with_capacity(dirs.len() * quad);
        let mut sample_offsets: Vec<Point> = Vec::with_capacity(dirs.len() * quad);
        for a in &dirs {
            for t in 0..quad {
                let theta = 2.0 * std::f64::consts::PI * (t as f64) / (quad as f64);
                let rot = point::cplx_rotate(a, theta, n);
                let off = point::scale(&rot, delta_abs);
                sample_offsets.push(off);
                let mut base = [0i64; 4];
                let mut frac = [0.0f64; 4];
                for k in 0..rd {
                    let cells = off[k] / h;
                    let fl = cells.floor();
                    base[k] = fl as i64;
                    frac[k] = cells - fl;
                }
                let mut offsets = Vec::with_capacity(corners);
                let mut weights = Vec::with_capacity(corners);
                for c in 0..corners {
                    let mut w = 1.0f64;
                    let mut flat_off = 0i64;
                    for k in 0..rd {
                        let bit = (c >> k) & 1;
                        w *= if bit == 1 { frac[k] } else { 1.0 - frac[k] };
                        flat_off += (base[k] + bit as i64) * strides[k] as i64;
                    }
                    if w > 1e-12 {
                        offsets.push(flat_off as i32);
                        weights.push(w);
                    }
                }
                let wsum: f64 = weights.iter().sum();
                for w in &mut weights {
                    *w /= wsum;
                }
                stencils.push(Stencil { offsets, weights });
            }
        }

        let lo = trace.min();
        let hi = trace.max();
        let bindex = BoundaryIndex { grid: &grid };
        let wall_value = |q: &Point, fallback: &Point| -> f64 {
            let raw = if let Some(v) = trace.eval_at(q) {
                v
            } else if let Some(ord) = bindex.nearest(q) {
                trace.get(ord)
            } else if let Some(ord) = bindex.nearest(fallback) {
                trace.get(ord)
            } else {
                trace.values().first().copied().unwrap_or(0.0)
            };
            raw.clamp(lo, hi)
        };

        let interior = grid.interior();
        // A sample interpolates only from all-interior cells; anything else
        // is shortened to its wall crossing so that no value is ever read
        // across the wall.
        let usable = |f: usize, stencil_idx: usize| -> bool {
            stencils[stencil_idx].offsets.iter().all(|&off| {
                let g = f as i64 + off as i64;
                g >= 0
                    && (g as usize) < grid.len()
                    && grid.class(g as usize) == NodeClass::Interior
            })
        };
        let half = quad / 2;
        struct Fix {
            key: u16,
            wplus: f64,
            vplus: f64,
            vminus: f64,
        }
        let per_node: Vec<Vec<Fix>> = par::map_indexed(interior.len(), |ord| {
            let f = interior[ord] as usize;
            let z = grid.lattice_pos(f);
            let mut fixes: Vec<Fix> = Vec::new();
            for d in 0..dirs.len() {
                for t in 0..half {
                    let idx_p = d * quad + t;
                    let idx_m = idx_p + half;
                    let up = usable(f, idx_p);
                    let um = usable(f, idx_m);
                    if up && um {
                        continue;
                    }
                    // Shorten the exiting side(s) to the wall crossing.
                    let resolve = |idx: usize, ok: bool| -> (f64, f64) {
                        if ok {
                            return (delta_abs, f64::NAN);
                        }
                        let p = point::add(&z, &sample_offsets[idx]);
                        match grid.ray_crossing(&z, &p) {
                            Some(q) => {
                                let s = point::dist(&q, &z, rd).max(1e-6 * h);
                                (s, wall_value(&q, &p))
                            }
                            None => (delta_abs, wall_value(&p, &z)),
                        }
                    };
                    let (sp, vp) = resolve(idx_p, up);
                    let (sm, vm) = resolve(idx_m, um);
                    fixes.push(Fix {
                        key: (d * half + t) as u16,
                        wplus: sm / (sm + sp),
                        vplus: vp,
                        vminus: vm,
                    });
                }
            }
            fixes
        });

        let mut fix_start = Vec::with_capacity(interior.len() + 1);
        let mut fix_key = Vec::new();
        let mut fix_wplus = Vec::new();
        let mut fix_vplus = Vec::new();
        let mut fix_vminus = Vec::new();
        fix_start.push(0u32);
        for list in &per_node {
            for fx in list {
                fix_key.push(fx.key);
                fix_wplus.push(fx.wplus);
                fix_vplus.push(fx.vplus);
                fix_vminus.push(fx.vminus);
            }
            fix_start.push(fix_key.len() as u32);
        }

        let mut trace_values = vec![f64::NAN; grid.len()];
        for (ord, &bf) in grid.boundary().iter().enumerate() {
            trace_values[bf as usize] = trace.get(ord);
        }
        let init_value = trace.max();

        Ok(SweepPlan {
            grid,
            dirs,
            quad,
            delta_abs,
            tol_iter: cfg.effective_tol(trace.range()),
            max_iter: cfg.max_iter,
            stencils,
            fix_start,
            fix_key,
            fix_wplus,
            fix_vplus,
            fix_vminus,
            trace_values,
            init_value,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Initial field: boundary pinned to the trace, interior at `max h`.
    pub fn initial_field(&self) -> ScalarField {
        let mut values = self.trace_values.clone();
        for &f in self.grid.interior() {
            values[f as usize] = self.init_value;
        }
        ScalarField::new(self.grid.clone(), values)
    }

    /// Work vector for the iteration (interpolation never reads boundary
    /// slots, so the values pass through unchanged).
    pub fn work_from(&self, field: &ScalarField) -> Vec<f64> {
        field.values().to_vec()
    }

    /// Turn a work vector back into a field with pinned boundary values.
    pub fn finalize(&self, mut work: Vec<f64>) -> ScalarField {
        for &bf in self.grid.boundary() {
            work[bf as usize] = self.trace_values[bf as usize];
        }
        ScalarField::new(self.grid.clone(), work)
    }

    #[inline]
    fn gather(&self, prev: &[f64], f: usize, stencil_idx: usize) -> f64 {
        let st = &self.stencils[stencil_idx];
        let mut s = 0.0f64;
        for (i, &off) in st.offsets.iter().enumerate() {
            s += st.weights[i] * prev[(f as i64 + off as i64) as usize];
        }
        s
    }

    /// Per-direction circle means of `prev` at interior ordinal `ord`.
    #[inline]
    fn means_at(&self, prev: &[f64], ord: usize, means: &mut [f64; 64]) {
        let f = self.grid.interior()[ord] as usize;
        let ndirs = self.dirs.len();
        let quad_inv = 1.0 / self.quad as f64;
        let half = self.quad / 2;
        let lo = self.fix_start[ord] as usize;
        let hi = self.fix_start[ord + 1] as usize;
        let mut cursor = lo;
        for d in 0..ndirs {
            let mut acc = 0.0f64;
            for t in 0..half {
                let key = (d * half + t) as u16;
                if cursor < hi && self.fix_key[cursor] == key {
                    let wp = self.fix_wplus[cursor];
                    let vp = self.fix_vplus[cursor];
                    let vp = if vp.is_nan() {
                        self.gather(prev, f, d * self.quad + t)
                    } else {
                        vp
                    };
                    let vm = self.fix_vminus[cursor];
                    let vm = if vm.is_nan() {
                        self.gather(prev, f, d * self.quad + t + half)
                    } else {
                        vm
                    };
                    // vm + wp (vp - vm): exact for vp = vm.
                    acc += 2.0 * (vm + wp * (vp - vm));
                    cursor += 1;
                } else {
                    acc += self.gather(prev, f, d * self.quad + t)
                        + self.gather(prev, f, d * self.quad + t + half);
                }
            }
            means[d] = acc * quad_inv;
        }
    }

    /// Frame-rule value (min over frames of max over the frame's lines).
    fn frame_value(&self, prev: &[f64], ord: usize, frames: &FrameSet) -> f64 {
        let mut means = [0.0f64; 64];
        self.means_at(prev, ord, &mut means);
        let mut value = f64::INFINITY;
        for frame in &frames.frames {
            let mut fmax = f64::NEG_INFINITY;
            for &d in frame {
                fmax = fmax.max(means[d]);
            }
            value = value.min(fmax);
        }
        value
    }

    /// One Jacobi sweep in place; returns the sup-norm change.
    pub fn sweep_once(&self, values: &mut [f64], frames: &FrameSet) -> f64 {
        let interior = self.grid.interior();
        let new_vals: Vec<f64> = par::map_indexed(interior.len(), |ord| {
            let f = interior[ord] as usize;
            values[f].min(self.frame_value(values, ord, frames))
        });
        self.scatter(values, &new_vals)
    }

    /// Sequential variant of [`Self::sweep_once`] (same arithmetic, no rayon);
    /// exposed for the bench suite comparing both paths.
    pub fn sweep_once_seq(&self, values: &mut [f64], frames: &FrameSet) -> f64 {
        let interior = self.grid.interior();
        let new_vals: Vec<f64> = par::map_indexed_seq(interior.len(), |ord| {
            let f = interior[ord] as usize;
            values[f].min(self.frame_value(values, ord, frames))
        });
        self.scatter(values, &new_vals)
    }

    fn scatter(&self, values: &mut [f64], new_vals: &[f64]) -> f64 {
        let mut change: f64 = 0.0;
        for (ord, &f) in self.grid.interior().iter().enumerate() {
            let f = f as usize;
            change = change.max((values[f] - new_vals[ord]).abs());
            values[f] = new_vals[ord];
        }
        change
    }

    /// Iterate to the fixed point from the constant majorant.
    pub fn solve(&self, frames: &FrameSet) -> Result<EnvelopeRun> {
        let mut work = self.work_from(&self.initial_field());
        let mut change = f64::INFINITY;
        for it in 1..=self.max_iter {
            change = self.sweep_once(&mut work, frames);
            if change < self.tol_iter {
                return Ok(EnvelopeRun {
                    field: self.finalize(work),
                    sweeps: it,
                    final_change: change,
                    tol_iter: self.tol_iter,
                });
            }
        }
        Err(Error::NoConvergence {
            residual: change,
            iters: self.max_iter,
        })
    }

    /// One sweep applied to an arbitrary field on the same grid; returns the
    /// swept field and the sup-norm change (idempotence, candidate checks).
    pub fn sweep_field(&self, field: &ScalarField, frames: &FrameSet) -> (ScalarField, f64) {
        let mut work = self.work_from(field);
        let change = self.sweep_once(&mut work, frames);
        (self.finalize(work), change)
    }

    /// Measured quadrature + interpolation bound for a closed-form field:
    /// the worst difference, over interior nodes and directions, between the
    /// plan's circle mean of the lattice samples of `exact` and the exact
    /// full-circle quadrature of `exact`. One sweep applied to a
    /// sweep-invariant closed form moves it by at most about twice this.
    pub fn sample_consistency(&self, exact: &crate::field::TraceFn) -> f64 {
        let e = exact.clone();
        let w = ScalarField::from_fn_lattice(self.grid.clone(), move |p| e(p));
        let work = self.work_from(&w);
        let n = self.grid.n;
        let interior = self.grid.interior();
        par::max_indexed(interior.len(), |ord| {
            let z = self.grid.lattice_pos(interior[ord] as usize);
            let mut means = [0.0f64; 64];
            self.means_at(&work, ord, &mut means);
            let mut worst = 0.0f64;
            for (d, a) in self.dirs.iter().enumerate() {
                let mut acc = 0.0;
                for t in 0..self.quad {
                    let theta = 2.0 * std::f64::consts::PI * (t as f64) / (self.quad as f64);
                    let rot = point::cplx_rotate(a, theta, n);
                    acc += exact(&point::axpy(&z, self.delta_abs, &rot));
                }
                worst = worst.max((means[d] - acc / self.quad as f64).abs());
            }
            worst
        })
    }

    /// Minimum over interior nodes of `frame_value(u) - u` and its argmin.
    /// `>= -tol` is the discrete q-psh certificate (psh for q = 0 frames).
    pub fn surplus_min(&self, field: &ScalarField, frames: &FrameSet) -> (f64, usize) {
        let interior = self.grid.interior();
        let work = self.work_from(field);
        let per: Vec<f64> = par::map_indexed(interior.len(), |ord| {
            let f = interior[ord] as usize;
            self.frame_value(&work, ord, frames) - work[f]
        });
        let mut min = f64::INFINITY;
        let mut worst = 0usize;
        for (ord, &s) in per.iter().enumerate() {
            if s < min {
                min = s;
                worst = interior[ord] as usize;
            }
        }
        (min, worst)
    }
}

/// Maximal plurisubharmonic extension of `trace`: the discrete
/// Perron-Bremermann envelope on a bounded grid.
pub fn psh_envelope(
    grid: &Arc<Grid>,
    trace: &BoundaryTrace,
    cfg: &EnvelopeConfig,
) -> Result<EnvelopeRun> {
    let plan = SweepPlan::build(grid.clone(), trace, cfg)?;
    let frames = frames_for(grid.n, 0, plan.dirs.len())?;
    plan.solve(&frames)
}

/// Minimal plurisuperharmonic extension: `-psh_envelope(-trace)` through the
/// signed escape hatch.
pub fn plurisuperharmonic_envelope(
    grid: &Arc<Grid>,
    trace: &BoundaryTrace,
    cfg: &EnvelopeConfig,
) -> Result<EnvelopeRun> {
    let neg = trace.negate();
    let run = psh_envelope(grid, &neg, cfg)?;
    Ok(EnvelopeRun {
        field: run.field.negate(),
        sweeps: run.sweeps,
        final_change: run.final_change,
        tol_iter: run.tol_iter,
    })
}

/// q-plurisubharmonic envelope; q = 0 coincides with [`psh_envelope`].
pub fn q_psh_envelope(
    grid: &Arc<Grid>,
    trace: &BoundaryTrace,
    q: usize,
    cfg: &EnvelopeConfig,
) -> Result<EnvelopeRun> {
    let plan = SweepPlan::build(grid.clone(), trace, cfg)?;
    let frames = frames_for(grid.n, q, plan.dirs.len())?;
    plan.solve(&frames)
}

/// Discrete psh certificate of a field against its own boundary values:
/// minimum circle-mean surplus over interior nodes and directions, with the
/// worst node. Values `>= -tol` certify the field. Without a closed-form
/// trace the wall handling is first-order, so tolerances should scale with
/// `spacing * edge slope`; prefer [`psh_surplus_with_trace`] when the data
/// has a closed form.
pub fn psh_surplus(field: &ScalarField, cfg: &EnvelopeConfig) -> Result<(f64, usize)> {
    let trace = BoundaryTrace::from_field(field);
    psh_surplus_with_trace(field, &trace, cfg)
}

/// Discrete psh certificate with an explicit trace (its evaluator, when
/// present, pins wall samples and ghosts exactly).
pub fn psh_surplus_with_trace(
    field: &ScalarField,
    trace: &BoundaryTrace,
    cfg: &EnvelopeConfig,
) -> Result<(f64, usize)> {
    let grid = field.grid().clone();
    let plan = SweepPlan::build(grid.clone(), trace, cfg)?;
    let frames = frames_for(grid.n, 0, plan.dirs.len())?;
    Ok(plan.surplus_min(field, &frames))
}

/// Discrete psh certificate for a closed-form function: circle means are
/// evaluated from the closed form directly, with no interpolation and no
/// wall clamping, so the test covers a one-sample neighborhood of the
/// closed domain. This is the right certificate for barriers and scripted
/// competitors that are psh on all of R^{2n}.
pub fn psh_surplus_closed_form(
    grid: &Arc<Grid>,
    f: &crate::field::TraceFn,
    cfg: &EnvelopeConfig,
) -> Result<(f64, usize)> {
    let n = grid.n;
    cfg.validate(n)?;
    let dirs = point::complex_directions(n, cfg.resolved_directions(n));
    let delta = cfg.delta_cells * grid.spacing;
    let quad = cfg.quad_points;
    let interior = grid.interior();
    let per: Vec<f64> = par::map_indexed(interior.len(), |ord| {
        let z = grid.lattice_pos(interior[ord] as usize);
        let center = f(&z);
        let mut worst = f64::INFINITY;
        for a in &dirs {
            let mut acc = 0.0;
            for t in 0..quad {
                let theta = 2.0 * std::f64::consts::PI * (t as f64) / (quad as f64);
                let rot = point::cplx_rotate(a, theta, n);
                acc += f(&point::axpy(&z, delta, &rot));
            }
            worst = worst.min(acc / quad as f64 - center);
        }
        worst
    });
    let mut min = f64::INFINITY;
    let mut worst = 0usize;
    for (ord, &s) in per.iter().enumerate() {
        if s < min {
            min = s;
            worst = interior[ord] as usize;
        }
    }
    Ok((min, worst))
}

/// Quadrature average of `field` over the circle `z + delta e^{i theta} a`
/// at the interior node `node`. Off-node values are interpolated; samples
/// whose cell leaves the domain are clamped to the field value at the
/// boundary node nearest to the crossing of the sample ray with the wall.
pub fn circle_mean(
    field: &ScalarField,
    node: usize,
    a: &Point,
    delta_abs: f64,
    quad_points: usize,
) -> Result<f64> {
    let grid = field.grid().clone();
    let rd = grid.rd();
    let n = grid.n;
    let h = grid.spacing;
    if grid.class(node) != NodeClass::Interior {
        return Err(Error::StencilOutOfDomain);
    }
    let z = grid.lattice_pos(node);
    let strides = grid.strides();
    let bindex = BoundaryIndex { grid: &grid };
    let mut acc = 0.0;
    let mut alive = 0usize;
    for t in 0..quad_points {
        let theta = 2.0 * std::f64::consts::PI * (t as f64) / (quad_points as f64);
        let rot = point::cplx_rotate(a, theta, n);
        let off = point::scale(&rot, delta_abs);
        let p = point::add(&z, &off);
        let mut base = [0i64; 4];
        let mut frac = [0.0f64; 4];
        for k in 0..rd {
            let cells = off[k] / h;
            let fl = cells.floor();
            base[k] = fl as i64;
            frac[k] = cells - fl;
        }
        let corners = 1usize << rd;
        let mut value = 0.0;
        let mut wsum = 0.0;
        let mut ok = true;
        for c in 0..corners {
            let mut w = 1.0f64;
            let mut flat_off = 0i64;
            for k in 0..rd {
                let bit = (c >> k) & 1;
                w *= if bit == 1 { frac[k] } else { 1.0 - frac[k] };
                flat_off += (base[k] + bit as i64) * strides[k] as i64;
            }
            if w <= 1e-12 {
                continue;
            }
            let g = node as i64 + flat_off;
            if g < 0 || g as usize >= grid.len() || !grid.in_domain(g as usize) {
                ok = false;
                break;
            }
            value += w * field.get(g as usize);
            wsum += w;
        }
        if ok {
            acc += value / wsum;
            alive += 1;
        } else {
            let q = grid.ray_crossing(&z, &p).unwrap_or(p);
            if let Some(ord) = bindex.nearest(&q) {
                acc += field.get(grid.boundary()[ord] as usize);
                alive += 1;
            }
        }
    }
    if alive < quad_points {
        return Err(Error::StencilOutOfDomain);
    }
    Ok(acc / quad_points as f64)
}

#[cfg(test)]
mod tests;
