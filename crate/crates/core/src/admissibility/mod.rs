//! Structural constants estimated by sampling, and every p-admissibility condition.

mod conditions;
mod estimates;
mod report;
mod sampling;

pub use conditions::*;
pub use estimates::*;
pub use report::*;
pub use sampling::{sweep_max, sweep_min, SamplePoint, SampleSpec, SweepMax};
