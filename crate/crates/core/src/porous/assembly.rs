//! Finite-difference operators, residuals and Jacobians.
//!
//! With `r = dt / h^2` and `theta` the scheme weight, the residual is
//!
//! `F(u) = u - u_prev - theta r (L_D(u) u + g(u)) - (1 - theta) r (L_D(u_prev) u_prev + g(u_prev))`
//!
//! where `g` collects the Dirichlet contributions. Its exact derivative is
//! `I - theta r (L_D(u) + T_N(u) diag(D'(u)) / 2)`.

use super::{DiffusivitySpec, Dirichlet, Grid, Neighbor};
use crate::error::{Result, SolverError};
use crate::linalg::BandedMatrix;
use crate::solver::Scheme;

/// The spatial discretisation: grid, boundary data and diffusivity.
#[derive(Debug, Clone, PartialEq)]
pub struct PorousModel {
    pub grid: Grid,
    pub bc: Dirichlet,
    pub diffusivity: DiffusivitySpec,
}

impl PorousModel {
    pub fn new(grid: Grid, bc: Dirichlet, diffusivity: DiffusivitySpec) -> Result<Self> {
        bc.validate(&grid)?;
        Ok(Self {
            grid,
            bc,
            diffusivity,
        })
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(SolverError::DimensionMismatch {
                expected: self.dim(),
                found: u.len(),
            });
        }
        Ok(())
    }

    /// `L_D(u)` with face coefficients `(D(u_j) + D(u_k)) / 2`, plus the
    /// Dirichlet right-hand side `g` so that `L_D u + g` is the full stencil.
    pub fn assemble_l_d(&self, u: &[f64]) -> Result<(BandedMatrix, Vec<f64>)> {
        self.check(u)?;
        let n = self.dim();
        let d: Vec<f64> = u.iter().map(|&v| self.diffusivity.eval(v)).collect();
        let mut l = BandedMatrix::zeros(n, &self.grid.stencil_offsets());
        let mut g = vec![0.0; n];
        for k in 0..n {
            for nb in self.grid.neighbors(k, &self.bc) {
                match nb {
                    Neighbor::Interior(j) => {
                        let face = 0.5 * (d[k] + d[j]);
                        l.add(k, j, face);
                        l.add(k, k, -face);
                    }
                    Neighbor::Boundary(b) => {
                        let face = 0.5 * (d[k] + self.diffusivity.eval(b));
                        l.add(k, k, -face);
                        g[k] += face * b;
                    }
                }
            }
        }
        if !l.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite {
                context: "diffusivity evaluation",
            });
        }
        Ok((l, g))
    }

    /// `T_N(u)`: off-diagonal `u_j - u_k`, diagonal the sum of all arm
    /// differences (boundary arms included).
    pub fn assemble_t_n(&self, u: &[f64]) -> Result<BandedMatrix> {
        self.check(u)?;
        let n = self.dim();
        let mut t = BandedMatrix::zeros(n, &self.grid.stencil_offsets());
        for k in 0..n {
            for nb in self.grid.neighbors(k, &self.bc) {
                let v = match nb {
                    Neighbor::Interior(j) => {
                        t.add(k, j, u[j] - u[k]);
                        u[j]
                    }
                    Neighbor::Boundary(b) => b,
                };
                t.add(k, k, v - u[k]);
            }
        }
        Ok(t)
    }

    /// `L_D(u) u + g(u)` evaluated directly from face fluxes.
    pub fn diffusion(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u)?;
        let d: Vec<f64> = u.iter().map(|&v| self.diffusivity.eval(v)).collect();
        let out: Vec<f64> = (0..u.len())
            .map(|k| {
                self.grid
                    .neighbors(k, &self.bc)
                    .into_iter()
                    .map(|nb| {
                        let (dj, uj) = match nb {
                            Neighbor::Interior(j) => (d[j], u[j]),
                            Neighbor::Boundary(b) => (self.diffusivity.eval(b), b),
                        };
                        0.5 * (d[k] + dj) * (uj - u[k])
                    })
                    .sum()
            })
            .collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite {
                context: "diffusion operator",
            });
        }
        Ok(out)
    }

    /// `dt / h^2`
    pub fn ratio(&self, dt: f64) -> f64 {
        dt / (self.grid.h() * self.grid.h())
    }

    /// Residual given the precomputed `L_D(u_prev) u_prev + g(u_prev)`.
    pub fn residual_with(
        &self,
        u: &[f64],
        u_prev: &[f64],
        prev_diffusion: &[f64],
        dt: f64,
        scheme: Scheme,
    ) -> Result<Vec<f64>> {
        let theta = scheme.theta();
        let r = self.ratio(dt);
        let cur = self.diffusion(u)?;
        Ok((0..u.len())
            .map(|k| u[k] - u_prev[k] - theta * r * cur[k] - (1.0 - theta) * r * prev_diffusion[k])
            .collect())
    }

    pub fn residual(&self, u: &[f64], u_prev: &[f64], dt: f64, scheme: Scheme) -> Result<Vec<f64>> {
        self.check(u_prev)?;
        let prev = self.diffusion(u_prev)?;
        self.residual_with(u, u_prev, &prev, dt, scheme)
    }

    /// `X_N = I - theta r L_D(u)`, the symmetric part used for preconditioning.
    pub fn x_n(&self, u: &[f64], dt: f64, scheme: Scheme) -> Result<BandedMatrix> {
        let (l, _) = self.assemble_l_d(u)?;
        l.linear_combination(
            -scheme.theta() * self.ratio(dt),
            &BandedMatrix::identity(u.len()),
            1.0,
        )
    }

    /// `Y_N = -theta r T_N(u) diag(D'(u)) / 2`.
    pub fn y_n(&self, u: &[f64], dt: f64, scheme: Scheme) -> Result<BandedMatrix> {
        let mut t = self.assemble_t_n(u)?;
        let dp: Vec<f64> = u.iter().map(|&v| self.diffusivity.derivative(v)).collect();
        t.scale_columns(&dp);
        t.scale(-0.5 * scheme.theta() * self.ratio(dt));
        Ok(t)
    }

    /// `F'(u) = X_N + Y_N`.
    pub fn jacobian(&self, u: &[f64], dt: f64, scheme: Scheme) -> Result<BandedMatrix> {
        self.x_n(u, dt, scheme)?
            .linear_combination(1.0, &self.y_n(u, dt, scheme)?, 1.0)
    }
}
