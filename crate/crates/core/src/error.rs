use thiserror::Error;

/// Errors surfaced by the geometry, envelope and exhaustion operations.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("no interior node in the requested box at this spacing")]
    EmptyDiscretization,

    #[error("no recession direction survives the containment probes")]
    NoRecessionDirection,

    #[error("slab is unbounded transversally to the recession direction")]
    UnboundedSlab,

    #[error("arithmetic overflow")]
    ArithmeticOverflow,

    #[error("stencil leaves the discretized domain")]
    StencilOutOfDomain,

    #[error("iteration did not converge (residual {residual:.3e} after {iters} sweeps)")]
    NoConvergence { residual: f64, iters: usize },

    #[error("negative trace value {value:.6e} at boundary node {node} (signed traces need a bounded grid)")]
    NegativeTrace { node: usize, value: f64 },

    #[error("q = {q} out of range for complex dimension n = {n}")]
    InvalidQ { q: usize, n: usize },

    #[error("glue hypothesis u >= v failed on the patch rim at node {node} (gap {gap:.3e})")]
    GlueHypothesisFailed { node: usize, gap: f64 },

    #[error("cut component touches the grid hull; component is not resolved as bounded")]
    UnboundedComponent,

    #[error("no multiple a <= {a_max:.1} makes the barrier pair psh/plurisuperharmonic")]
    BarrierNotPsh { a_max: f64 },

    #[error("patch {patch} solution does not vanish on its collar (residual {residual:.3e})")]
    PatchCollarViolation { patch: usize, residual: f64 },

    #[error("defining function is non-negative at interior node {node}")]
    DefiningFunctionFailure { node: usize },

    #[error("cap escalation did not stabilize after {caps_tried} caps")]
    CapEscalationDiverged { caps_tried: usize },

    #[error("exhaustion levels violate monotonicity by {worst:.3e}; caps under-resolved")]
    SchemeInconsistency { worst: f64 },

    #[error("sampled point (x1,y1)=({:.4},{:.4}) leaves the barrier region", witness.0, witness.1)]
    RegionContainmentFailed { witness: (f64, f64) },

    #[error("growth profile tail is too short for the limit test")]
    InsufficientTail,

    #[error("no boundary node with first coordinate <= {x:.4}")]
    EmptyPrefix { x: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("expression error at {line}:{col}: {msg}")]
    ExprParse { msg: String, line: usize, col: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
