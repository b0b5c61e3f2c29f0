use crate::error::{Result, SolverError};
use crate::multigrid::GridShape;
use crate::porous::Dimension;

/// Staggered grids on `[0, L]^d` with `h = L / N`.
///
/// `s` lives on the nodes `x_i = i h`, `i = 1..=N` per axis (node 0 is on
/// the exposed Dirichlet side, node `N` on the free-flow side); `c` lives on
/// the cell centres `(p + 1/2) h`, `p = 0..N`. In 2D the exposed sides are
/// left and bottom, nodes are numbered `(j - 1) N + (i - 1)` and cells
/// `q N + p`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredGrid {
    dimension: Dimension,
    n: usize,
    length: f64,
    cells: Vec<Cell>,
}

/// Local geometry of one cell.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Cell {
    /// Corner nodes; `None` marks a Dirichlet node.
    pub nodes: Vec<Option<usize>>,
}

impl StaggeredGrid {
    pub fn new(dimension: Dimension, n: usize, length: f64) -> Result<Self> {
        if n < 3 {
            return Err(SolverError::InvalidArgument(format!(
                "staggered grid needs at least 3 cells per axis, got {n}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(SolverError::InvalidArgument(format!(
                "domain length must be positive, got {length}"
            )));
        }
        let node = |i: usize, j: usize| -> Option<usize> {
            match dimension {
                Dimension::One => (i >= 1).then(|| i - 1),
                Dimension::Two => (i >= 1 && j >= 1).then(|| (j - 1) * n + (i - 1)),
            }
        };
        let cells = match dimension {
            Dimension::One => (0..n)
                .map(|p| Cell {
                    nodes: vec![node(p, 1), node(p + 1, 1)],
                })
                .collect(),
            Dimension::Two => (0..n * n)
                .map(|k| {
                    let (p, q) = (k % n, k / n);
                    Cell {
                        nodes: vec![
                            node(p, q),
                            node(p + 1, q),
                            node(p, q + 1),
                            node(p + 1, q + 1),
                        ],
                    }
                })
                .collect(),
        };
        Ok(Self {
            dimension,
            n,
            length,
            cells,
        })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Unknowns per field (`N` or `N^2`).
    pub fn field_len(&self) -> usize {
        match self.dimension {
            Dimension::One => self.n,
            Dimension::Two => self.n * self.n,
        }
    }

    pub fn shape(&self) -> GridShape {
        match self.dimension {
            Dimension::One => GridShape::Line(self.n),
            Dimension::Two => GridShape::Square(self.n),
        }
    }

    pub(crate) fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Share of a cell's storage attached to each of its nodes.
    pub(crate) fn mass_weight(&self) -> f64 {
        match self.dimension {
            Dimension::One => 0.5,
            Dimension::Two => 0.25,
        }
    }

    /// Cell edges as local node pairs with their weight in the flux sum.
    pub(crate) fn edges(&self) -> &'static [(usize, usize, f64)] {
        match self.dimension {
            Dimension::One => &[(0, 1, 1.0)],
            Dimension::Two => &[(0, 1, 0.5), (2, 3, 0.5), (0, 2, 0.5), (1, 3, 0.5)],
        }
    }

    /// Coordinates of the `s` unknowns.
    pub fn node_points(&self) -> Vec<Vec<f64>> {
        let h = self.h();
        (0..self.field_len())
            .map(|k| match self.dimension {
                Dimension::One => vec![(k + 1) as f64 * h],
                Dimension::Two => vec![(k % self.n + 1) as f64 * h, (k / self.n + 1) as f64 * h],
            })
            .collect()
    }

    /// Coordinates of the `c` unknowns.
    pub fn cell_points(&self) -> Vec<Vec<f64>> {
        let h = self.h();
        (0..self.field_len())
            .map(|k| match self.dimension {
                Dimension::One => vec![(k as f64 + 0.5) * h],
                Dimension::Two => vec![
                    ((k % self.n) as f64 + 0.5) * h,
                    ((k / self.n) as f64 + 0.5) * h,
                ],
            })
            .collect()
    }
}
