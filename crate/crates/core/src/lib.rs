//! Numerical solvers for the Dirichlet problem of plurisubharmonic functions
//! on discretized domains of C^1 and C^2.
//!
//! The toolkit computes maximal plurisubharmonic extensions of boundary data
//! (Perron-Bremermann envelopes) by monotone sweeping on uniform grids, both
//! on bounded domains and on unbounded convex domains via a nested exhaustion
//! by slabs and balls. Around the solvers it provides:
//!
//! * implicit-domain geometry: defining functions, grid masks with boundary
//!   snapping, recession directions, exhaustion plans, the Lupacciolu
//!   polynomial condition ([`geometry`]);
//! * envelope operations: psh / plurisuperharmonic / q-psh envelopes, circle
//!   means, max-glueing, slice maximum principle, Lipschitz certificates and
//!   the envelope property suite ([`envelope`]);
//! * unbounded-domain machinery: patched continuous solutions, continuous
//!   defining functions, capped boundary extensions, the maximal solution as
//!   an infimum over exhaustion levels, growth profiles and barrier-backed
//!   continuity certificates ([`unbounded`]);
//! * cross-cutting verification: the pluriharmonic sandwich, q-Bremermann
//!   checks and discrete Levi spectra ([`analysis`]).
//!
//! All algorithms are deterministic: no randomness, Jacobi-style sweeps that
//! read an immutable snapshot, and reductions whose result does not depend on
//! the number of worker threads. The data-parallel inner loops run on rayon
//! when the `parallel` feature (default) is enabled and fall back to
//! sequential iteration otherwise; both paths produce bit-identical fields.

pub mod analysis;
pub mod defaults;
pub mod envelope;
pub mod error;
pub mod expr;
pub mod field;
pub mod geometry;
pub mod io;
pub mod par;
pub mod point;
pub mod unbounded;

pub use error::Error;
pub use field::{BoundaryTrace, ScalarField};
pub use geometry::{DomainSpec, Grid, NodeClass, PointClass, Region};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// A point of R^{2n}; only the first `2n` coordinates are meaningful.
/// Layout is `[x1, y1, x2, y2]` with `z_j = x_j + i y_j`.
pub type Point = [f64; 4];
