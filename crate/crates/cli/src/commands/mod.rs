mod check;
mod identities;
mod optimize;
mod simulate;
mod verify;

pub use check::run as check;
pub use identities::run as identities;
pub use optimize::run as optimize;
pub use simulate::run as simulate;
pub use verify::run as verify;

use lpgen_core::discrete::{Grid, GridFunction};
use lpgen_core::fields::CoefficientField;
use lpgen_core::identities::make_bump;
use lpgen_core::verify::gaussian_probe;

use crate::config::{InitialConfig, RunConfig};

pub(crate) fn grid(cfg: &RunConfig, d: usize) -> lpgen_core::Result<Grid> {
    Grid::new(d, cfg.grid.half_width, cfg.grid.n)
}

/// Initial datum on `grid`; bump seeds come from the sampling seed.
pub(crate) fn initial(cfg: &RunConfig, grid: &Grid, m: usize) -> GridFunction {
    match cfg.time.initial {
        InitialConfig::Bump { radius, richness } => {
            GridFunction::from_test_function(*grid, &make_bump(cfg.sampling.seed, grid.d, m, radius, richness))
        }
        InitialConfig::Gaussian { variance } => gaussian_probe(grid, m, variance),
    }
}

/// inf v over the grid nodes unless the config fixes it.
pub(crate) fn c0_inf(cfg: &RunConfig, field: &dyn CoefficientField, grid: &Grid) -> f64 {
    cfg.verify
        .c0_inf
        .unwrap_or_else(|| (0..grid.len()).map(|i| field.vscal(&grid.point(i))).fold(f64::INFINITY, f64::min))
}
