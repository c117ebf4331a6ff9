//! Numerical laboratory for vector-valued elliptic operators
//! 𝒜u = div(Q∇u) + Σᵢ BⁱDᵢu − Vu with unbounded coefficients.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissibility;
pub mod discrete;
pub mod error;
pub mod fields;
pub mod identities;
pub mod linalg;
pub mod optimizer;
pub mod verify;

pub use error::{Error, Result};
