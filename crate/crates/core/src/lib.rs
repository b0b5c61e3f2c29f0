//! Fully implicit Newton–Krylov solvers for degenerate parabolic equations.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: banded storage, a dense LU fallback and full GMRES.
//! * [`multigrid`]: Galerkin hierarchies and V-cycle preconditioning.
//! * [`newton`]: the Newton driver shared by both models.
//! * [`porous`]: the porous-medium equation with Barenblatt references.
//! * [`sulfation`]: the coupled two-field marble sulfation model.
//! * [`harness`]: configuration, studies and CSV/JSON emission.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod linalg;
pub mod multigrid;
pub mod newton;
pub mod parallel;
pub mod porous;
pub mod record;
pub mod solver;
pub mod sulfation;

pub use error::{Result, SolverError};
