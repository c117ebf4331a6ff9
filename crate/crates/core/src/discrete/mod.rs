//! Finite-difference discretization of 𝒜 and of div(Q∇) − v on a Dirichlet box, with time
//! steppers and resolvent solves.

mod gmres;
mod grid;
mod operator;
mod sparse;
mod stepping;

pub use gmres::{gmres, SOLVER_TOL};
pub use grid::{lp_norm, sup_norm, Grid, GridFunction};
pub use operator::{assemble, assemble_scalar, peclet_number, DiscreteOperator};
pub use sparse::CsrMatrix;
pub use stepping::*;

use crate::error::Result;
use crate::fields::CoefficientField;

/// S_h(t) for the scalar operator div(Q∇) − v with m = 1 data.
pub fn scalar_evolve(
    field: &dyn CoefficientField,
    grid: &Grid,
    f: &GridFunction,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
    p_list: &[f64],
) -> Result<Trajectory> {
    let op = assemble_scalar(field, grid)?;
    evolve(&op, f, t_end, dt, scheme, p_list, &[])
}
