//! Default tolerances and sampling parameters shared across the solvers.
//!
//! Every report echoes the values that were actually used, so a run can be
//! audited and replayed from its JSON output alone.

/// Half-cell band for classifying a node as Boundary: a point is Interior
/// when `rho < -TOL_GEOM * spacing` and Exterior when `rho > TOL_GEOM * spacing`.
pub const TOL_GEOM: f64 = 0.5;

/// Bisection tolerance for snapping boundary nodes onto `{rho = 0}`,
/// as a multiple of the grid spacing.
pub const SNAP_TOL: f64 = 1e-10;

/// Cells of padding added around the requested box so that every circle
/// stencil of a node in the domain indexes real lattice storage.
pub const PAD_CELLS: usize = 5;

/// Sampled complex directions for n = 1 and n = 2 sweeps.
pub const DIRECTIONS_N1: usize = 8;
pub const DIRECTIONS_N2: usize = 24;

/// Quadrature nodes per sampling circle.
pub const QUAD_POINTS: usize = 16;

/// Circle radius in cells.
pub const DELTA_CELLS: f64 = 2.0;

/// Stopping tolerance factor: `tol_iter = TOL_ITER_FACTOR * (trace range + 1)`.
pub const TOL_ITER_FACTOR: f64 = 1e-8;

/// Sweep budget before reporting `NoConvergence`.
pub const MAX_ITER: usize = 100_000;

/// Barrier escalation ceiling for Lipschitz certificates: `a` doubles from
/// its starting value until the psh pair verifies, up to this multiple.
pub const LIPSCHITZ_A_MAX: f64 = 65536.0;

/// Default patch radius for the patched continuous solution, in cells.
/// Halved on a collar violation down to `PATCH_RADIUS_MIN_CELLS`.
pub const PATCH_RADIUS_CELLS: f64 = 8.0;
pub const PATCH_RADIUS_MIN_CELLS: f64 = 2.0;

/// Default number of exhaustion levels.
pub const NU_MAX: usize = 6;

/// Cap doublings allowed before `CapEscalationDiverged`.
pub const CAP_MAX_STEPS: usize = 16;

/// Acceptance threshold factor for the growth-limit tail test.
pub const TAIL_RATIO_FACTOR: f64 = 1e-3;

/// Far-field probe length for recession and Lupacciolu ray sampling.
pub const PROBE_RADIUS: f64 = 1e3;
