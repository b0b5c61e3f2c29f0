use serde::{Deserialize, Serialize};

use super::GridShape;
use crate::error::{Result, SolverError};
use crate::linalg::BandedMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmootherKind {
    DampedJacobi,
    RedBlackGaussSeidel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmootherSpec {
    pub kind: SmootherKind,
    /// Relaxation weight in (0, 1].
    pub omega: f64,
    pub sweeps: usize,
}

impl SmootherSpec {
    pub fn damped_jacobi() -> Self {
        Self {
            kind: SmootherKind::DampedJacobi,
            omega: 2.0 / 3.0,
            sweeps: 1,
        }
    }

    pub fn red_black() -> Self {
        Self {
            kind: SmootherKind::RedBlackGaussSeidel,
            omega: 1.0,
            sweeps: 1,
        }
    }

    /// Damped Jacobi on lines, red-black Gauss–Seidel on squares.
    pub fn default_for(shape: GridShape) -> Self {
        match shape {
            GridShape::Line(_) => Self::damped_jacobi(),
            GridShape::Square(_) => Self::red_black(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(SolverError::InvalidArgument(
                "smoother needs at least one sweep".into(),
            ));
        }
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(SolverError::InvalidArgument(format!(
                "smoother weight {} outside (0, 1]",
                self.omega
            )));
        }
        Ok(())
    }
}

pub(crate) fn inverse_diagonal(a: &BandedMatrix) -> Result<Vec<f64>> {
    a.main_diagonal()
        .into_iter()
        .enumerate()
        .map(|(row, d)| {
            if d == 0.0 || !d.is_finite() {
                Err(SolverError::ZeroDiagonal { row })
            } else {
                Ok(1.0 / d)
            }
        })
        .collect()
}

pub(crate) fn sweep(
    a: &BandedMatrix,
    inv_diag: &[f64],
    shape: GridShape,
    x: &mut [f64],
    b: &[f64],
    spec: &SmootherSpec,
) {
    match spec.kind {
        SmootherKind::DampedJacobi => {
            let mut ax = vec![0.0; x.len()];
            for _ in 0..spec.sweeps {
                a.matvec_into(x, &mut ax);
                for (((xi, axi), bi), d) in x.iter_mut().zip(&ax).zip(b).zip(inv_diag) {
                    *xi += spec.omega * d * (bi - axi);
                }
            }
        }
        SmootherKind::RedBlackGaussSeidel => {
            for _ in 0..spec.sweeps {
                for red in [true, false] {
                    for i in (0..x.len()).filter(|&i| shape.is_red(i) == red) {
                        let mut ax = 0.0;
                        a.for_each_in_row(i, |j, v| ax += v * x[j]);
                        x[i] += spec.omega * inv_diag[i] * (b[i] - ax);
                    }
                }
            }
        }
    }
}

/// Applies `spec.sweeps` smoothing sweeps to `x` for the system `A x = b`.
pub fn smooth(
    a: &BandedMatrix,
    shape: GridShape,
    x: &[f64],
    b: &[f64],
    spec: &SmootherSpec,
) -> Result<Vec<f64>> {
    spec.validate()?;
    for len in [x.len(), b.len(), shape.dim()] {
        if len != a.order() {
            return Err(SolverError::DimensionMismatch {
                expected: a.order(),
                found: len,
            });
        }
    }
    let inv_diag = inverse_diagonal(a)?;
    let mut out = x.to_vec();
    sweep(a, &inv_diag, shape, &mut out, b, spec);
    Ok(out)
}
