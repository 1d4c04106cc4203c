//! Auxiliary-field-method approximations of N-body bound-state spectra,
//! exact duality relations between them, and reference solvers to check
//! both against.

pub mod afm;
pub mod cli;
pub mod duality;
pub mod error;
pub mod exact;
pub mod potentials;
pub mod quantum_numbers;
pub mod roots;
pub mod studies;
pub mod sweep;
pub mod tables;

pub use afm::{solve_afm, AfmSolution, Flavor, SystemSpec};
pub use error::{Error, Result};
pub use potentials::{parse_potential, Potential};
pub use quantum_numbers::{q_custom, q_ho, Preset, PrescriptionChoice, QPrescription, StateLabels};
