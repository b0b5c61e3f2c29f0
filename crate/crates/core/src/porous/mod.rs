//! Porous-medium equation `u_t = div(D(u) grad u)` on uniform grids.
//!
//! Interior unknowns sit on a vertex grid with Dirichlet data on the
//! boundary nodes. Time stepping is implicit Euler or Crank–Nicolson, each
//! step solved by Newton–GMRES with a multigrid preconditioner built on the
//! symmetric part `X_N` of the Jacobian.

mod assembly;
mod barenblatt;
mod diffusivity;
mod grid;
mod integrate;

pub use assembly::PorousModel;
pub use barenblatt::{barenblatt, barenblatt_constants, support_radius};
pub use diffusivity::DiffusivitySpec;
pub use grid::{Dimension, Dirichlet, Grid, Neighbor};
pub use integrate::{
    error_vs_exact, integrate, step, uniform_timestep, IntegrationPlan, PorousState,
    PorousStepProblem,
};

/// Default domain for Barenblatt runs: `[-6, 6]` per axis.
pub const BARENBLATT_DOMAIN: (f64, f64) = (-6.0, 6.0);
/// Default time origin of Barenblatt runs (the profile is singular at 0).
pub const BARENBLATT_T0: f64 = 1.0;
/// Default elapsed time of Barenblatt runs.
pub const BARENBLATT_ELAPSED: f64 = 20.0 / 32.0;

/// `u_t = lap(u^m)` with homogeneous Dirichlet data on the default
/// Barenblatt domain; the Barenblatt profile with exponent `m` is exact.
pub fn barenblatt_model(dimension: Dimension, n: usize, m: f64) -> crate::Result<PorousModel> {
    let (a, b) = BARENBLATT_DOMAIN;
    let grid = Grid::new(dimension, a, b, n)?;
    PorousModel::new(
        grid,
        Dirichlet::homogeneous(&grid),
        DiffusivitySpec::PorousMedium { m },
    )
}
