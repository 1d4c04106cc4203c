//! Reference solvers used to judge the AFM approximations.

pub mod ho;
pub mod mesh;
pub mod moshinsky;
pub mod predict;
pub mod quadrature;
pub mod salpeter;
pub mod three_body;

pub use mesh::{solve_radial_2b, universal_f_fn, MeshConfig, RadialSolution};
pub use moshinsky::{moshinsky_bracket, MoshinskyTable};
pub use predict::{effective_mass, predict_spectrum, MassKind, PredictMode};
pub use salpeter::{solve_salpeter_2b, SalpeterSolution};
pub use three_body::{solve_3b, Spectrum, SpectrumEntry, Symmetry, ThreeBodyBasisConfig};
