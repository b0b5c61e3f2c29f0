use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};

/// Physical constants of the sulfation model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SulfationParams {
    /// Reaction rate.
    pub a: f64,
    /// SO2 diffusivity.
    pub d: f64,
    pub m_c: f64,
    pub m_s: f64,
    /// Porosity law `phi(c) = alpha c + beta`.
    pub alpha: f64,
    pub beta: f64,
    /// Initial carbonate concentration.
    pub c0: f64,
    /// Porous concentration `phi s` imposed on the exposed boundary.
    pub rho_s0: f64,
}

impl Default for SulfationParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            d: 1.0,
            m_c: 100.09,
            m_s: 64.06,
            alpha: 0.01,
            beta: 0.1,
            c0: 1.0,
            rho_s0: 1.0,
        }
    }
}

impl SulfationParams {
    pub fn with_rate(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn porosity(&self, c: f64) -> f64 {
        self.alpha * c + self.beta
    }

    pub fn porosity_prime(&self) -> f64 {
        self.alpha
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(SolverError::InvalidArgument(what.to_string()));
        let finite = [
            self.a,
            self.d,
            self.m_c,
            self.m_s,
            self.alpha,
            self.beta,
            self.c0,
            self.rho_s0,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return bad("sulfation parameters must be finite");
        }
        if !(self.beta > 0.0) {
            return bad("beta must be positive (porosity bounded away from zero)");
        }
        if self.porosity(self.c0) <= 0.0 {
            return bad("porosity alpha*c0 + beta must be positive");
        }
        if self.a < 0.0 || self.d < 0.0 {
            return bad("reaction rate a and diffusivity d must be non-negative");
        }
        if !(self.m_c > 0.0 && self.m_s > 0.0) {
            return bad("molar masses m_c and m_s must be positive");
        }
        if self.c0 < 0.0 || self.rho_s0 < 0.0 {
            return bad("c0 and rho_s0 must be non-negative");
        }
        Ok(())
    }
}
