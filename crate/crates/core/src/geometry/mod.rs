//! Implicit-domain geometry: parametric domains, grid discretization,
//! recession directions, exhaustions and the Lupacciolu condition.

pub mod domain;
pub mod exhaustion;
pub mod grid;
pub mod lupacciolu;
pub mod recession;

pub use domain::{classify_point, DomainSpec, PointClass, PolyTerm, Polynomial, Region, Shape};
pub use exhaustion::{build_exhaustion, ExhaustionPlan};
pub use grid::{build_grid, Grid, NodeClass};
pub use lupacciolu::{lupacciolu_check, veronese_dimension, LupacciouluReport};
pub use recession::recession_direction;
