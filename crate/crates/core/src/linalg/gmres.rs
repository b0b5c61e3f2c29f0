//! Full (non-restarted) GMRES with left preconditioning.

use serde::{Deserialize, Serialize};

use super::{axpy, dot, norm2, LinearOperator, Preconditioner};
use crate::error::{Result, SolverError};

/// Orthogonality loss that triggers a second Gram–Schmidt pass.
const REORTH_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GmresConfig {
    /// Relative reduction of the preconditioned residual norm.
    pub rtol: f64,
    pub max_iter: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KrylovReport {
    pub iterations: usize,
    /// Preconditioned residual norms, starting with the initial one.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// Inner cycles spent by the preconditioner during this solve.
    pub inner_cycles: usize,
}

impl KrylovReport {
    pub fn relative_residual(&self) -> f64 {
        match (self.residual_history.first(), self.residual_history.last()) {
            (Some(&r0), Some(&r)) if r0 > 0.0 => r / r0,
            _ => 0.0,
        }
    }
}

fn precondition(m: Option<&dyn Preconditioner>, r: &[f64], z: &mut [f64]) {
    match m {
        Some(m) => m.apply(r, z),
        None => z.copy_from_slice(r),
    }
}

/// Solves `A x = b` with GMRES, left-preconditioned by `m` when given.
///
/// Stops once `|M(b - A x)| <= rtol |M(b - A x0)|` or after `max_iter`
/// Arnoldi steps; in the latter case the report has `converged == false`.
pub fn gmres<A>(
    a: &A,
    m: Option<&dyn Preconditioner>,
    b: &[f64],
    x0: &[f64],
    cfg: &GmresConfig,
) -> Result<(Vec<f64>, KrylovReport)>
where
    A: LinearOperator + ?Sized,
{
    let n = a.dim();
    for len in [b.len(), x0.len()] {
        if len != n {
            return Err(SolverError::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    if let Some(m) = m {
        if m.dim() != n {
            return Err(SolverError::DimensionMismatch {
                expected: n,
                found: m.dim(),
            });
        }
    }
    if !(cfg.rtol > 0.0) {
        return Err(SolverError::InvalidArgument(format!(
            "GMRES rtol must be positive, got {}",
            cfg.rtol
        )));
    }
    let cycles_before = m.map_or(0, |m| m.inner_cycles());

    let mut x = x0.to_vec();
    let mut tmp = vec![0.0; n];
    a.apply(&x, &mut tmp);
    let r: Vec<f64> = b.iter().zip(&tmp).map(|(bi, ai)| bi - ai).collect();
    let mut w = vec![0.0; n];
    precondition(m, &r, &mut w);
    let beta = norm2(&w);
    if !beta.is_finite() {
        return Err(SolverError::NonFinite {
            context: "GMRES initial residual",
        });
    }
    let mut report = KrylovReport {
        residual_history: vec![beta],
        ..KrylovReport::default()
    };
    if beta == 0.0 {
        report.converged = true;
        return Ok((x, report));
    }
    let target = cfg.rtol * beta;
    let max_iter = cfg.max_iter.min(n).max(1);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter + 1);
    basis.push(w.iter().map(|v| v / beta).collect());
    // Column j of the Hessenberg matrix, already rotated.
    let mut hess: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut cs: Vec<f64> = Vec::with_capacity(max_iter);
    let mut sn: Vec<f64> = Vec::with_capacity(max_iter);
    let mut g = vec![beta];
    let mut breakdown = false;

    for j in 0..max_iter {
        a.apply(&basis[j], &mut tmp);
        precondition(m, &tmp, &mut w);
        let w_norm0 = norm2(&w);

        let mut h = vec![0.0; j + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = dot(v, &w);
            h[i] = hij;
            axpy(-hij, v, &mut w);
        }
        let mut w_norm = norm2(&w);
        if w_norm > 0.0 {
            let loss = basis
                .iter()
                .map(|v| dot(v, &w).abs())
                .fold(0.0_f64, f64::max)
                / w_norm;
            if loss > REORTH_THRESHOLD {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    h[i] += c;
                    axpy(-c, v, &mut w);
                }
                w_norm = norm2(&w);
            }
        }
        h[j + 1] = w_norm;

        for i in 0..j {
            let t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        let denom = h[j].hypot(h[j + 1]);
        let (c, s) = if denom == 0.0 {
            (1.0, 0.0)
        } else {
            (h[j] / denom, h[j + 1] / denom)
        };
        h[j] = denom;
        h[j + 1] = 0.0;
        cs.push(c);
        sn.push(s);
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s * gj);
        hess.push(h);

        let res = g[j + 1].abs();
        // Rotations keep this non-increasing in exact arithmetic; clamp roundoff.
        let prev = *report.residual_history.last().expect("non-empty history");
        report.residual_history.push(res.min(prev));
        report.iterations = j + 1;

        if res <= target {
            report.converged = true;
            break;
        }
        if w_norm <= 1e-14 * w_norm0.max(f64::MIN_POSITIVE) || !w_norm.is_finite() {
            breakdown = true;
            break;
        }
        basis.push(w.iter().map(|v| v / w_norm).collect());
    }

    let k = report.iterations;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|l| hess[l][i] * y[l]).sum();
        let d = hess[i][i];
        if d == 0.0 {
            return Err(SolverError::Breakdown {
                iteration: k,
                relative_residual: report.relative_residual(),
            });
        }
        y[i] = (g[i] - s) / d;
    }
    for (yi, v) in y.iter().zip(&basis) {
        axpy(*yi, v, &mut x);
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(SolverError::NonFinite {
            context: "GMRES iterate",
        });
    }
    if breakdown && !report.converged {
        return Err(SolverError::Breakdown {
            iteration: k,
            relative_residual: report.relative_residual(),
        });
    }
    report.inner_cycles = m.map_or(0, |m| m.inner_cycles()) - cycles_before;
    Ok((x, report))
}
