//! Test functions, quadrature, and the integral identity checks.

mod checks;
mod cutoff;
mod jet;
mod operator;
mod quadrature;
mod testfn;

pub use checks::*;
pub use cutoff::{make_cutoff, Cutoff, ZetaProfile};
pub use jet::Jet;
pub use operator::{apply_a0, apply_drift, apply_operator, apply_potential, operator_parts, OperatorParts};
pub use quadrature::QuadratureGrid;
pub use testfn::{make_bump, make_complex_bump, make_plateau, ComplexTestFunction, Profile, Summand, TestFunction};
