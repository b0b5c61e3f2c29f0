//! Coupled SO2 / carbonate model of marble sulfation.
//!
//! ```text
//! (phi(c) s)_t = -(a / m_c) phi(c) s c + d div(phi(c) grad s)
//!          c_t = -(a / m_s) phi(c) s c
//! ```
//!
//! with `phi(c) = alpha c + beta`, a fixed porous concentration `phi s` on
//! the exposed boundary and free flow elsewhere. Each implicit step is
//! solved by Newton–GMRES preconditioned with the block upper-triangular
//! part of the Jacobian.
//!
//! Implicit Euler keeps `c` in `[0, c0]` for any step. Crank–Nicolson needs
//! `dt (a / m_s) phi s <= 2` and is not L-stable, so under-resolved fast
//! reactions (`a = 1e4` at `dt = h = 1/128`) can drive `c` slightly negative.

mod assembly;
mod front;
mod grid;
mod integrate;
mod params;
mod precond;

pub use assembly::{JacobianBlocks, LevelTerms, SulfationModel};
pub use front::{fit_front_slope, front_position, least_squares_slope};
pub use grid::StaggeredGrid;
pub use integrate::{
    integrate, step, SulfationPlan, SulfationRun, SulfationState, SulfationStepProblem,
};
pub use params::SulfationParams;
pub use precond::{BlockTriangularPreconditioner, InnerSolve};
