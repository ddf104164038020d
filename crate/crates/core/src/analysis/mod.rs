//! Cross-cutting verification: the pluriharmonic sandwich, q-Bremermann
//! checks, and discrete Levi-form spectra.

pub mod levi;
pub mod qcheck;
pub mod sandwich;

pub use levi::{discrete_levi_spectrum, levi_matrix};
pub use qcheck::{q_bremermann_check, QBremermannReport};
pub use sandwich::{pluriharmonic_sandwich, SandwichReport};
