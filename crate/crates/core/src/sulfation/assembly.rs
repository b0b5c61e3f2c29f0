//! Cell-by-cell assembly of the sulfation residual and its block Jacobian.
//!
//! Each cell `K` with porosity `phi_K = phi(c_K)` contributes to its corner
//! nodes `n`:
//!
//! * storage `m_K phi_K s_n` and reaction `(a / m_c) m_K phi_K c_K s_n`,
//! * flux `(d / h^2) w_e (phi_K s_n - phi_K s_o)` for each cell edge `(n, o)`,
//!
//! and to its own row the reaction `(a / m_s) S_K c_K` with
//! `S_K = mean over corners of phi_K s_n`. On the exposed side `phi_K s_n`
//! is replaced by `rho_s0`. With `m_K = 1/2`, `w_e = 1` in 1D this is the
//! three-point staggered scheme; the last node carries half a stencil, which
//! is the mirrored free-flow closure divided by two.

use super::{StaggeredGrid, SulfationParams};
use crate::error::{Result, SolverError};
use crate::linalg::{BandedMatrix, LinearOperator};
use crate::porous::Dimension;
use crate::solver::Scheme;

/// Residual contributions at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTerms {
    /// `sum_K m_K phi_K s_n` per node.
    pub storage: Vec<f64>,
    /// Reaction plus diffusion per node.
    pub rate_s: Vec<f64>,
    /// Reaction per cell.
    pub rate_c: Vec<f64>,
}

/// `J = [[Jss, Jsc], [Jcs, Jcc]]` for unknowns ordered `[s; c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianBlocks {
    pub jss: BandedMatrix,
    pub jsc: BandedMatrix,
    pub jcs: BandedMatrix,
    /// Diagonal of `Jcc`.
    pub jcc: Vec<f64>,
}

impl JacobianBlocks {
    pub fn field_len(&self) -> usize {
        self.jcc.len()
    }

    /// Dense `2n x 2n` copy, for diagnostics and tests.
    pub fn to_dense(&self) -> crate::linalg::DenseMatrix {
        let n = self.field_len();
        let mut m = crate::linalg::DenseMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            self.jss.for_each_in_row(i, |j, v| m[(i, j)] += v);
            self.jsc.for_each_in_row(i, |j, v| m[(i, n + j)] += v);
            self.jcs.for_each_in_row(i, |j, v| m[(n + i, j)] += v);
            m[(n + i, n + i)] += self.jcc[i];
        }
        m
    }
}

impl LinearOperator for JacobianBlocks {
    fn dim(&self) -> usize {
        2 * self.field_len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.field_len();
        let (xs, xc) = x.split_at(n);
        let (ys, yc) = y.split_at_mut(n);
        let mut tmp = vec![0.0; n];
        self.jss.matvec_into(xs, ys);
        self.jsc.matvec_into(xc, &mut tmp);
        ys.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b);
        self.jcs.matvec_into(xs, yc);
        for ((a, d), v) in yc.iter_mut().zip(&self.jcc).zip(xc) {
            *a += d * v;
        }
    }
}

/// Discretised sulfation model on a staggered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SulfationModel {
    pub params: SulfationParams,
    pub grid: StaggeredGrid,
}

impl SulfationModel {
    pub fn new(params: SulfationParams, grid: StaggeredGrid) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, grid })
    }

    pub fn field_len(&self) -> usize {
        self.grid.field_len()
    }

    fn check(&self, s: &[f64], c: &[f64]) -> Result<()> {
        let n = self.field_len();
        for len in [s.len(), c.len()] {
            if len != n {
                return Err(SolverError::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        Ok(())
    }

    fn diffusion_scale(&self) -> f64 {
        let h = self.grid.h();
        self.params.d / (h * h)
    }

    /// `phi_K s_n`, or `rho_s0` on the exposed side.
    fn porous_concentration(&self, node: Option<usize>, phi: f64, s: &[f64]) -> f64 {
        match node {
            Some(n) => phi * s[n],
            None => self.params.rho_s0,
        }
    }

    pub fn level_terms(&self, s: &[f64], c: &[f64]) -> Result<LevelTerms> {
        self.check(s, c)?;
        let p = &self.params;
        let n = self.field_len();
        let mk = self.grid.mass_weight();
        let dd = self.diffusion_scale();
        let mut storage = vec![0.0; n];
        let mut rate_s = vec![0.0; n];
        let mut rate_c = vec![0.0; n];
        for (k, cell) in self.grid.cells().iter().enumerate() {
            let phi = p.porosity(c[k]);
            let mut sum = 0.0;
            for &node in &cell.nodes {
                sum += self.porous_concentration(node, phi, s);
                if let Some(j) = node {
                    storage[j] += mk * phi * s[j];
                    rate_s[j] += p.a / p.m_c * mk * phi * c[k] * s[j];
                }
            }
            for &(l1, l2, w) in self.grid.edges() {
                let (a, b) = (cell.nodes[l1], cell.nodes[l2]);
                let (ra, rb) = (
                    self.porous_concentration(a, phi, s),
                    self.porous_concentration(b, phi, s),
                );
                if let Some(j) = a {
                    rate_s[j] += dd * w * (ra - rb);
                }
                if let Some(j) = b {
                    rate_s[j] += dd * w * (rb - ra);
                }
            }
            let s_k = sum / cell.nodes.len() as f64;
            rate_c[k] = p.a / p.m_s * s_k * c[k];
        }
        Ok(LevelTerms {
            storage,
            rate_s,
            rate_c,
        })
    }

    /// Residual `[F_s; F_c]` given the terms of the previous level.
    pub fn residual_with(
        &self,
        s: &[f64],
        c: &[f64],
        c_prev: &[f64],
        prev: &LevelTerms,
        dt: f64,
        scheme: Scheme,
    ) -> Result<Vec<f64>> {
        let cur = self.level_terms(s, c)?;
        let theta = scheme.theta();
        let n = self.field_len();
        let mut f = Vec::with_capacity(2 * n);
        for j in 0..n {
            f.push(
                cur.storage[j] - prev.storage[j]
                    + dt * (theta * cur.rate_s[j] + (1.0 - theta) * prev.rate_s[j]),
            );
        }
        for k in 0..n {
            f.push(
                c[k] - c_prev[k] + dt * (theta * cur.rate_c[k] + (1.0 - theta) * prev.rate_c[k]),
            );
        }
        Ok(f)
    }

    pub fn residual(
        &self,
        s: &[f64],
        c: &[f64],
        s_prev: &[f64],
        c_prev: &[f64],
        dt: f64,
        scheme: Scheme,
    ) -> Result<Vec<f64>> {
        let prev = self.level_terms(s_prev, c_prev)?;
        self.residual_with(s, c, c_prev, &prev, dt, scheme)
    }

    fn block_offsets(&self) -> (Vec<isize>, Vec<isize>, Vec<isize>) {
        let n = self.grid.n() as isize;
        match self.grid.dimension() {
            Dimension::One => (vec![-1, 0, 1], vec![0, 1], vec![-1, 0]),
            Dimension::Two => (
                vec![-n, -1, 0, 1, n],
                vec![0, 1, n, n + 1],
                vec![-n - 1, -n, -1, 0],
            ),
        }
    }

    pub fn assemble_jacobian(
        &self,
        s: &[f64],
        c: &[f64],
        dt: f64,
        scheme: Scheme,
    ) -> Result<JacobianBlocks> {
        self.check(s, c)?;
        let p = &self.params;
        let n = self.field_len();
        let tau = scheme.theta() * dt;
        let mk = self.grid.mass_weight();
        let dd = self.diffusion_scale();
        let alpha = p.porosity_prime();
        let (oss, osc, ocs) = self.block_offsets();
        let mut jss = BandedMatrix::zeros(n, &oss);
        let mut jsc = BandedMatrix::zeros(n, &osc);
        let mut jcs = BandedMatrix::zeros(n, &ocs);
        let mut jcc = vec![0.0; n];
        for (k, cell) in self.grid.cells().iter().enumerate() {
            let ck = c[k];
            let phi = p.porosity(ck);
            let nn = cell.nodes.len() as f64;
            let mut s_k = 0.0;
            let mut ds_k = 0.0;
            for &node in &cell.nodes {
                s_k += self.porous_concentration(node, phi, s) / nn;
                if let Some(j) = node {
                    ds_k += alpha * s[j] / nn;
                    jss.add(j, j, mk * phi + tau * p.a / p.m_c * mk * phi * ck);
                    jsc.add(
                        j,
                        k,
                        mk * alpha * s[j] + tau * p.a / p.m_c * mk * (alpha * ck + phi) * s[j],
                    );
                    jcs.add(k, j, tau * p.a / p.m_s * ck * phi / nn);
                }
            }
            for &(l1, l2, w) in self.grid.edges() {
                for (me, other) in [
                    (cell.nodes[l1], cell.nodes[l2]),
                    (cell.nodes[l2], cell.nodes[l1]),
                ] {
                    let Some(j) = me else { continue };
                    let coef = tau * dd * w;
                    jss.add(j, j, coef * phi);
                    match other {
                        Some(o) => {
                            jss.add(j, o, -coef * phi);
                            jsc.add(j, k, coef * alpha * (s[j] - s[o]));
                        }
                        None => jsc.add(j, k, coef * alpha * s[j]),
                    }
                }
            }
            jcc[k] = 1.0 + tau * p.a / p.m_s * (s_k + ck * ds_k);
        }
        Ok(JacobianBlocks { jss, jsc, jcs, jcc })
    }

    /// Value of `s` on the exposed boundary node next to cell `k`: `rho_s0 / phi(c_k)`.
    pub fn boundary_s(&self, c_k: f64) -> f64 {
        self.params.rho_s0 / self.params.porosity(c_k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: usize, a: f64) -> SulfationModel {
        SulfationModel::new(
            SulfationParams::default().with_rate(a),
            StaggeredGrid::new(Dimension::One, n, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn reaction_off_decouples_carbonate() {
        let m = model(6, 0.0);
        let s = [0.3, 0.2, 0.5, 0.1, 0.0, 0.4];
        let c = [0.9, 0.8, 1.0, 0.7, 0.6, 0.5];
        let cp = [1.0; 6];
        let f = m
            .residual(&s, &c, &[0.0; 6], &cp, 0.1, Scheme::CrankNicolson)
            .unwrap();
        for k in 0..6 {
            assert_eq!(f[6 + k], c[k] - cp[k]);
        }
    }

    #[test]
    fn jcc_matches_closed_form_in_the_interior() {
        let m = model(8, 3.0);
        let s: Vec<f64> = (0..8).map(|i| 0.1 * i as f64).collect();
        let c: Vec<f64> = (0..8).map(|i| 1.0 - 0.05 * i as f64).collect();
        let dt = 0.02;
        let j = m
            .assemble_jacobian(&s, &c, dt, Scheme::CrankNicolson)
            .unwrap();
        let p = m.params;
        // cell 3 spans nodes 3 and 4, i.e. unknowns 2 and 3
        let want = 1.0
            + dt / 2.0 * p.a / p.m_s * (p.alpha * c[3] + p.porosity(c[3])) * (s[2] + s[3]) / 2.0;
        assert!((j.jcc[3] - want).abs() < 1e-15);
    }

    #[test]
    fn diffusion_block_is_symmetric() {
        let m = model(8, 5.0);
        let s: Vec<f64> = (0..8).map(|i| (i as f64).sin().abs()).collect();
        let c: Vec<f64> = (0..8).map(|i| 0.5 + 0.05 * i as f64).collect();
        let j = m
            .assemble_jacobian(&s, &c, 0.1, Scheme::ImplicitEuler)
            .unwrap();
        assert!(j.jss.is_symmetric(0.0));
    }
}
