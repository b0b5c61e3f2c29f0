use thiserror::Error;

pub type Result<T, E = SolverError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error(
        "GMRES breakdown at iteration {iteration} with relative residual {relative_residual:e}"
    )]
    Breakdown {
        iteration: usize,
        relative_residual: f64,
    },

    #[error("GMRES did not converge in {iterations} iterations (relative residual {relative_residual:e})")]
    LinearNotConverged {
        iterations: usize,
        relative_residual: f64,
    },

    #[error("zero diagonal entry in row {row}")]
    ZeroDiagonal { row: usize },

    #[error("cannot coarsen a grid of dimension {dim}")]
    TooSmallToCoarsen { dim: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("Newton iteration {iteration}: {source}")]
    Linear {
        iteration: usize,
        #[source]
        source: Box<SolverError>,
    },

    #[error("Newton diverged at iteration {iteration}: non-finite residual")]
    Diverged { iteration: usize },

    #[error(
        "Newton did not converge in {iterations} iterations (last increment {last_increment:e})"
    )]
    NewtonNotConverged {
        iterations: usize,
        last_increment: f64,
    },

    #[error("timestep guard rejected dt = {dt:e} > C*h = {c:e} * {h:e}")]
    TimestepGuard { dt: f64, h: f64, c: f64 },

    #[error("step {step} (t = {t}): {source}")]
    Step {
        step: usize,
        t: f64,
        #[source]
        source: Box<SolverError>,
    },

    #[error("no front: concentration profile has zero gradient")]
    NoFront,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
