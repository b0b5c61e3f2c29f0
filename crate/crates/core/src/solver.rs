//! Time discretisation and solver choices shared by both models.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::linalg::GmresConfig;
use crate::multigrid::MgmPreconditioner;
use crate::newton::NewtonConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ImplicitEuler,
    #[serde(alias = "crank-nicholson")]
    CrankNicolson,
}

impl Scheme {
    /// Weight of the new time level: 1 for implicit Euler, 1/2 for Crank–Nicolson.
    pub fn theta(self) -> f64 {
        match self {
            Scheme::ImplicitEuler => 1.0,
            Scheme::CrankNicolson => 0.5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::ImplicitEuler => "implicit-euler",
            Scheme::CrankNicolson => "crank-nicolson",
        }
    }
}

/// How the Newton linear systems are preconditioned.
///
/// For the sulfation model the two multigrid modes select the inner solve of
/// the block upper-triangular preconditioner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreconditionerMode {
    None,
    #[serde(alias = "block-triangular")]
    OneVCycle,
    #[serde(alias = "block-triangular-mgm")]
    MgmToConvergence,
}

impl PreconditionerMode {
    pub fn label(self) -> &'static str {
        match self {
            PreconditionerMode::None => "none",
            PreconditionerMode::OneVCycle => "one-v-cycle",
            PreconditionerMode::MgmToConvergence => "mgm-to-convergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub newton: NewtonConfig,
    pub linear: GmresConfig,
    pub preconditioner: PreconditionerMode,
    /// Stopping tolerance of the inner multigrid solve in `mgm-to-convergence` mode.
    pub inner_rtol: f64,
    pub inner_max_cycles: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            newton: NewtonConfig::default(),
            linear: GmresConfig::default(),
            preconditioner: PreconditionerMode::OneVCycle,
            inner_rtol: MgmPreconditioner::DEFAULT_RTOL,
            inner_max_cycles: MgmPreconditioner::DEFAULT_MAX_CYCLES,
        }
    }
}

impl SolverConfig {
    pub fn with_preconditioner(mut self, mode: PreconditionerMode) -> Self {
        self.preconditioner = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.newton.validate()?;
        if !(self.linear.rtol > 0.0) || self.linear.max_iter == 0 {
            return Err(SolverError::InvalidArgument(
                "linear solver needs rtol > 0 and max_iter >= 1".into(),
            ));
        }
        if !(self.inner_rtol > 0.0) || self.inner_max_cycles == 0 {
            return Err(SolverError::InvalidArgument(
                "inner multigrid solve needs inner_rtol > 0 and inner_max_cycles >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Multigrid preconditioner on `matrix` for the given mode; `None` for
/// [`PreconditionerMode::None`].
pub fn multigrid_preconditioner(
    matrix: crate::linalg::BandedMatrix,
    shape: crate::multigrid::GridShape,
    cfg: &SolverConfig,
) -> Result<Option<Box<dyn crate::linalg::Preconditioner>>> {
    use crate::multigrid::{MultigridHierarchy, SmootherSpec, VCyclePreconditioner};
    if cfg.preconditioner == PreconditionerMode::None {
        return Ok(None);
    }
    let hierarchy = MultigridHierarchy::new(matrix, shape, SmootherSpec::default_for(shape))?;
    Ok(Some(match cfg.preconditioner {
        PreconditionerMode::OneVCycle => Box::new(VCyclePreconditioner::new(hierarchy)),
        _ => Box::new(MgmPreconditioner::new(
            hierarchy,
            cfg.inner_rtol,
            cfg.inner_max_cycles,
        )),
    }))
}
