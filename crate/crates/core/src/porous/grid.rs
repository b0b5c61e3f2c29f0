use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::multigrid::GridShape;

/// Number of space dimensions; serialised as the integer 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dimension {
    One,
    Two,
}

impl TryFrom<u8> for Dimension {
    type Error = String;

    fn try_from(d: u8) -> std::result::Result<Self, String> {
        match d {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            _ => Err(format!("dimension must be 1 or 2, got {d}")),
        }
    }
}

impl From<Dimension> for u8 {
    fn from(d: Dimension) -> u8 {
        d.count() as u8
    }
}

impl Dimension {
    pub fn count(self) -> usize {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }
}

/// Uniform vertex grid on `[a, b]` (per axis) with `n` interior points and
/// `h = (b - a) / (n + 1)`. Interior unknowns are ordered lexicographically
/// with the first axis fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dimension: Dimension,
    a: f64,
    b: f64,
    n: usize,
}

/// Where a stencil arm lands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighbor {
    Interior(usize),
    Boundary(f64),
}

impl Grid {
    pub fn new(dimension: Dimension, a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(SolverError::InvalidArgument(format!(
                "grid needs at least 3 interior points per axis, got {n}"
            )));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(SolverError::InvalidArgument(format!(
                "invalid domain [{a}, {b}]"
            )));
        }
        Ok(Self { dimension, a, b, n })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n + 1) as f64
    }

    /// Number of interior unknowns.
    pub fn len(&self) -> usize {
        self.shape().dim()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> GridShape {
        match self.dimension {
            Dimension::One => GridShape::Line(self.n),
            Dimension::Two => GridShape::Square(self.n),
        }
    }

    /// `x_k = a + k h` for `k = 0..=n+1`.
    pub fn node(&self, k: usize) -> f64 {
        self.a + k as f64 * self.h()
    }

    /// Coordinates of interior unknown `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        match self.dimension {
            Dimension::One => vec![self.node(idx + 1)],
            Dimension::Two => vec![self.node(idx % self.n + 1), self.node(idx / self.n + 1)],
        }
    }

    /// `h^d`, the measure attached to each unknown.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dimension.count() as i32)
    }

    /// Stencil arms of unknown `idx`: left/right in 1D, then down/up in 2D.
    pub fn neighbors(&self, idx: usize, bc: &Dirichlet) -> Vec<Neighbor> {
        let n = self.n;
        match self.dimension {
            Dimension::One => vec![
                if idx > 0 {
                    Neighbor::Interior(idx - 1)
                } else {
                    Neighbor::Boundary(bc.left[0])
                },
                if idx + 1 < n {
                    Neighbor::Interior(idx + 1)
                } else {
                    Neighbor::Boundary(bc.right[0])
                },
            ],
            Dimension::Two => {
                let (i, j) = (idx % n, idx / n);
                vec![
                    if i > 0 {
                        Neighbor::Interior(idx - 1)
                    } else {
                        Neighbor::Boundary(bc.left[j])
                    },
                    if i + 1 < n {
                        Neighbor::Interior(idx + 1)
                    } else {
                        Neighbor::Boundary(bc.right[j])
                    },
                    if j > 0 {
                        Neighbor::Interior(idx - n)
                    } else {
                        Neighbor::Boundary(bc.bottom[i])
                    },
                    if j + 1 < n {
                        Neighbor::Interior(idx + n)
                    } else {
                        Neighbor::Boundary(bc.top[i])
                    },
                ]
            }
        }
    }

    /// Diagonal offsets of a nearest-neighbour stencil on this grid.
    pub fn stencil_offsets(&self) -> Vec<isize> {
        let n = self.n as isize;
        match self.dimension {
            Dimension::One => vec![-1, 0, 1],
            Dimension::Two => vec![-n, -1, 0, 1, n],
        }
    }
}

/// Fixed Dirichlet values on the boundary nodes adjacent to the interior.
///
/// In 1D `left` and `right` hold one value each; in 2D every side holds `n`
/// values ordered along the side, and `bottom`/`top` are used.
#[derive(Debug, Clone, PartialEq)]
pub struct Dirichlet {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
}

impl Dirichlet {
    pub fn homogeneous(grid: &Grid) -> Self {
        Self::from_fn(grid, |_| 0.0)
    }

    /// Samples `g` at the boundary nodes.
    pub fn from_fn(grid: &Grid, g: impl Fn(&[f64]) -> f64) -> Self {
        let n = grid.n();
        let (lo, hi) = (grid.node(0), grid.node(n + 1));
        match grid.dimension() {
            Dimension::One => Self {
                left: vec![g(&[lo])],
                right: vec![g(&[hi])],
                bottom: vec![],
                top: vec![],
            },
            Dimension::Two => {
                let side = |f: &dyn Fn(f64) -> Vec<f64>| -> Vec<f64> {
                    (1..=n).map(|k| g(&f(grid.node(k)))).collect()
                };
                Self {
                    left: side(&|y| vec![lo, y]),
                    right: side(&|y| vec![hi, y]),
                    bottom: side(&|x| vec![x, lo]),
                    top: side(&|x| vec![x, hi]),
                }
            }
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let (want_lr, want_bt) = match grid.dimension() {
            Dimension::One => (1, 0),
            Dimension::Two => (grid.n(), grid.n()),
        };
        for (side, want) in [
            (&self.left, want_lr),
            (&self.right, want_lr),
            (&self.bottom, want_bt),
            (&self.top, want_bt),
        ] {
            if side.len() != want {
                return Err(SolverError::DimensionMismatch {
                    expected: want,
                    found: side.len(),
                });
            }
        }
        Ok(())
    }
}
