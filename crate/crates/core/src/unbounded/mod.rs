//! Unbounded-domain machinery: patched continuous solutions, continuous
//! defining functions, the exhaustion-based maximal solution, growth
//! profiles and barrier-backed continuity certificates.

pub mod barrier;
pub mod exhaust;
pub mod growth;
pub mod patches;

pub use barrier::{
    continuity_certificate, replay_certificate, BarrierCertificate, BarrierChecks, BarrierKind,
    BarrierParams,
};
pub use exhaust::{
    boundary_family, capped_extension_envelope, check_domination, level_grid, maximal_solution,
    CapReport, ConvergenceReport, DominationReport, LevelSolve, MaximalSolution,
};
pub use growth::{growth_profile, synthetic_profile, GrowthProfile};
pub use patches::{
    continuous_solution, continuous_solution_adaptive, defining_function, PatchReport,
};
