//! Full-weighting projections and Galerkin coarsening.

use std::collections::BTreeMap;

use crate::error::{Result, SolverError};
use crate::linalg::BandedMatrix;

/// Geometry of a level: `n` interior points per axis, lexicographic in 2D.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridShape {
    Line(usize),
    Square(usize),
}

impl GridShape {
    pub fn dim(&self) -> usize {
        match *self {
            GridShape::Line(n) => n,
            GridShape::Square(n) => n * n,
        }
    }

    pub fn per_axis(&self) -> usize {
        match *self {
            GridShape::Line(n) | GridShape::Square(n) => n,
        }
    }

    /// Keeps every other unknown per axis, starting from the second: `n -> floor(n / 2)`.
    ///
    /// For odd `n` this is standard vertex-centred coarsening. For even `n`
    /// the last unknown stays a coarse point, so a free (Neumann) end is
    /// represented on every level.
    pub fn coarsen(&self) -> Option<GridShape> {
        let nc = self.per_axis() / 2;
        if nc == 0 {
            return None;
        }
        Some(match self {
            GridShape::Line(_) => GridShape::Line(nc),
            GridShape::Square(_) => GridShape::Square(nc),
        })
    }

    /// Red/black colour of unknown `i` (true = red).
    pub fn is_red(&self, i: usize) -> bool {
        match *self {
            GridShape::Line(_) => i.is_multiple_of(2),
            GridShape::Square(n) => (i % n + i / n).is_multiple_of(2),
        }
    }

    /// Dimension at or below which a hierarchy stops coarsening.
    pub fn coarsest_threshold(&self) -> usize {
        match self {
            GridShape::Line(_) => 7,
            GridShape::Square(_) => 9,
        }
    }
}

/// Rectangular restriction `P` (coarse x fine); its transpose is (bi)linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    fine: GridShape,
    coarse: GridShape,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
}

fn stencil_1d(n: usize, nc: usize) -> Vec<Vec<(usize, f64)>> {
    (0..nc)
        .map(|i| {
            [(2 * i, 0.5), (2 * i + 1, 1.0), (2 * i + 2, 0.5)]
                .into_iter()
                .filter(|&(j, _)| j < n)
                .collect()
        })
        .collect()
}

/// Builds the projection from `fine` onto the next coarser grid.
///
/// Row `I` of the 1D operator is `½[1 2 1]` centred on fine index `2I + 1`;
/// the 2D operator is the tensor product of two 1D operators. For even `n`
/// the last row is truncated to `½[1 2]`.
pub fn build_projection(fine: GridShape) -> Result<Projection> {
    let coarse = fine
        .coarsen()
        .ok_or(SolverError::TooSmallToCoarsen { dim: fine.dim() })?;
    let n = fine.per_axis();
    let nc = coarse.per_axis();
    let s1 = stencil_1d(n, nc);
    let rows: Vec<Vec<(usize, f64)>> = match fine {
        GridShape::Line(_) => s1,
        GridShape::Square(_) => {
            let mut rows = Vec::with_capacity(nc * nc);
            for jc in 0..nc {
                for ic in 0..nc {
                    let mut row = Vec::with_capacity(9);
                    for &(jf, wy) in &s1[jc] {
                        for &(if_, wx) in &s1[ic] {
                            row.push((jf * n + if_, wx * wy));
                        }
                    }
                    rows.push(row);
                }
            }
            rows
        }
    };
    let mut cols = vec![Vec::new(); fine.dim()];
    for (i, row) in rows.iter().enumerate() {
        for &(j, w) in row {
            cols[j].push((i, w));
        }
    }
    Ok(Projection {
        fine,
        coarse,
        rows,
        cols,
    })
}

impl Projection {
    pub fn fine_dim(&self) -> usize {
        self.fine.dim()
    }

    pub fn coarse_dim(&self) -> usize {
        self.coarse.dim()
    }

    pub fn fine_shape(&self) -> GridShape {
        self.fine
    }

    pub fn coarse_shape(&self) -> GridShape {
        self.coarse
    }

    /// Nonzeros `(fine column, weight)` of coarse row `i`.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// `P r`
    pub fn restrict(&self, r: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * r[j]).sum())
            .collect()
    }

    /// `P^T y`
    pub fn interpolate(&self, y: &[f64]) -> Vec<f64> {
        self.cols
            .iter()
            .map(|col| col.iter().map(|&(i, w)| w * y[i]).sum())
            .collect()
    }
}

/// Galerkin triple product `P A P^T`.
pub fn galerkin_coarsen(a: &BandedMatrix, p: &Projection) -> Result<BandedMatrix> {
    if a.order() != p.fine_dim() {
        return Err(SolverError::DimensionMismatch {
            expected: p.fine_dim(),
            found: a.order(),
        });
    }
    let nc = p.coarse_dim();
    let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (ci, row) in p.rows.iter().enumerate() {
        for &(i, pw) in row {
            a.for_each_in_row(i, |j, aij| {
                if aij == 0.0 {
                    return;
                }
                for &(cj, qw) in &p.cols[j] {
                    *acc.entry((ci, cj)).or_insert(0.0) += pw * aij * qw;
                }
            });
        }
    }
    let triplets: Vec<(usize, usize, f64)> = acc.into_iter().map(|((i, j), v)| (i, j, v)).collect();
    Ok(BandedMatrix::from_triplets(nc, &triplets))
}
