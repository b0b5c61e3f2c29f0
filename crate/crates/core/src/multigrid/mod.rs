//! Geometric multigrid with Galerkin coarse operators.
//!
//! The cycle is the V(ν,0) recursion: pre-smooth, form `r = A ũ - b`,
//! restrict, recurse from a zero guess and subtract the interpolated
//! correction. Only the coarsest level is solved exactly.

mod projection;
mod smoother;

use std::sync::atomic::{AtomicUsize, Ordering};

pub use projection::{build_projection, galerkin_coarsen, GridShape, Projection};
pub use smoother::{smooth, SmootherKind, SmootherSpec};

use crate::error::{Result, SolverError};
use crate::linalg::{norm2, BandedMatrix, LuFactors, Preconditioner};

#[derive(Debug, Clone)]
struct Level {
    matrix: BandedMatrix,
    shape: GridShape,
    inv_diag: Vec<f64>,
    /// Projection to the next coarser level; `None` on the coarsest.
    projection: Option<Projection>,
}

#[derive(Debug, Clone)]
pub struct MultigridHierarchy {
    levels: Vec<Level>,
    coarsest: LuFactors,
    smoother: SmootherSpec,
}

impl MultigridHierarchy {
    pub fn new(a: BandedMatrix, shape: GridShape, smoother: SmootherSpec) -> Result<Self> {
        Self::with_threshold(a, shape, smoother, shape.coarsest_threshold())
    }

    /// Coarsens until the level dimension is `<= threshold` (or no further
    /// coarsening is possible); that level is factorised densely.
    pub fn with_threshold(
        a: BandedMatrix,
        shape: GridShape,
        smoother: SmootherSpec,
        threshold: usize,
    ) -> Result<Self> {
        smoother.validate()?;
        if a.order() != shape.dim() {
            return Err(SolverError::DimensionMismatch {
                expected: shape.dim(),
                found: a.order(),
            });
        }
        let mut levels = Vec::new();
        let mut matrix = a;
        let mut shape = shape;
        loop {
            let coarser = if shape.dim() > threshold {
                shape.coarsen()
            } else {
                None
            };
            match coarser {
                Some(_) => {
                    let p = build_projection(shape)?;
                    let coarse = galerkin_coarsen(&matrix, &p)?;
                    let next_shape = p.coarse_shape();
                    levels.push(Level {
                        inv_diag: smoother::inverse_diagonal(&matrix)?,
                        matrix,
                        shape,
                        projection: Some(p),
                    });
                    matrix = coarse;
                    shape = next_shape;
                }
                None => {
                    let coarsest = matrix.to_dense().lu()?;
                    levels.push(Level {
                        inv_diag: vec![],
                        matrix,
                        shape,
                        projection: None,
                    });
                    return Ok(Self {
                        levels,
                        coarsest,
                        smoother,
                    });
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn dim(&self) -> usize {
        self.levels[0].shape.dim()
    }

    pub fn level_dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.shape.dim()).collect()
    }

    pub fn matrix(&self, level: usize) -> &BandedMatrix {
        &self.levels[level].matrix
    }

    pub fn smoother(&self) -> &SmootherSpec {
        &self.smoother
    }

    /// One V-cycle on `level` starting from `x_in`.
    pub fn v_cycle(&self, level: usize, x_in: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        if level >= self.levels.len() {
            return Err(SolverError::InvalidArgument(format!(
                "level {level} outside hierarchy of depth {}",
                self.levels.len()
            )));
        }
        let dim = self.levels[level].shape.dim();
        for len in [x_in.len(), b.len()] {
            if len != dim {
                return Err(SolverError::DimensionMismatch {
                    expected: dim,
                    found: len,
                });
            }
        }
        Ok(self.cycle(level, x_in.to_vec(), b))
    }

    fn cycle(&self, level: usize, mut x: Vec<f64>, b: &[f64]) -> Vec<f64> {
        let lv = &self.levels[level];
        let Some(p) = &lv.projection else {
            self.coarsest.solve_into(b, &mut x);
            return x;
        };
        smoother::sweep(
            &lv.matrix,
            &lv.inv_diag,
            lv.shape,
            &mut x,
            b,
            &self.smoother,
        );
        let mut r = vec![0.0; x.len()];
        lv.matrix.matvec_into(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= bi;
        }
        let bc = p.restrict(&r);
        let y = self.cycle(level + 1, vec![0.0; bc.len()], &bc);
        for (xi, ci) in x.iter_mut().zip(p.interpolate(&y)) {
            *xi -= ci;
        }
        x
    }

    /// Repeated V-cycles until `|b - A x|_2 <= rtol |b - A x0|_2`.
    /// Returns the iterate, the number of cycles and whether the tolerance was met.
    pub fn solve(
        &self,
        b: &[f64],
        x0: &[f64],
        rtol: f64,
        max_cycles: usize,
    ) -> Result<(Vec<f64>, usize, bool)> {
        let a = &self.levels[0].matrix;
        let residual = |x: &[f64]| {
            let mut r = vec![0.0; x.len()];
            a.matvec_into(x, &mut r);
            r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
            norm2(&r)
        };
        let mut x = x0.to_vec();
        let r0 = residual(&x);
        if r0 == 0.0 {
            return Ok((x, 0, true));
        }
        for k in 1..=max_cycles {
            x = self.v_cycle(0, &x, b)?;
            let r = residual(&x);
            if !r.is_finite() {
                return Err(SolverError::NonFinite {
                    context: "multigrid iterate",
                });
            }
            if r <= rtol * r0 {
                return Ok((x, k, true));
            }
        }
        Ok((x, max_cycles, false))
    }
}

/// One V-cycle from a zero initial guess per application.
#[derive(Debug, Clone)]
pub struct VCyclePreconditioner {
    hierarchy: MultigridHierarchy,
}

impl VCyclePreconditioner {
    pub fn new(hierarchy: MultigridHierarchy) -> Self {
        Self { hierarchy }
    }

    pub fn hierarchy(&self) -> &MultigridHierarchy {
        &self.hierarchy
    }
}

impl Preconditioner for VCyclePreconditioner {
    fn dim(&self) -> usize {
        self.hierarchy.dim()
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let x = self.hierarchy.cycle(0, vec![0.0; r.len()], r);
        z.copy_from_slice(&x);
    }

    fn inner_cycles(&self) -> usize {
        0
    }
}

/// Multigrid driven to a relative residual tolerance on every application.
#[derive(Debug)]
pub struct MgmPreconditioner {
    hierarchy: MultigridHierarchy,
    rtol: f64,
    max_cycles: usize,
    cycles: AtomicUsize,
}

impl MgmPreconditioner {
    pub const DEFAULT_RTOL: f64 = 1e-8;
    pub const DEFAULT_MAX_CYCLES: usize = 200;

    pub fn new(hierarchy: MultigridHierarchy, rtol: f64, max_cycles: usize) -> Self {
        Self {
            hierarchy,
            rtol,
            max_cycles,
            cycles: AtomicUsize::new(0),
        }
    }
}

impl Preconditioner for MgmPreconditioner {
    fn dim(&self) -> usize {
        self.hierarchy.dim()
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let zero = vec![0.0; r.len()];
        match self.hierarchy.solve(r, &zero, self.rtol, self.max_cycles) {
            Ok((x, k, _)) => {
                self.cycles.fetch_add(k, Ordering::Relaxed);
                z.copy_from_slice(&x);
            }
            Err(_) => z.iter_mut().for_each(|v| *v = f64::NAN),
        }
    }

    fn inner_cycles(&self) -> usize {
        self.cycles.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> BandedMatrix {
        BandedMatrix::tridiagonal(&vec![-1.0; n - 1], &vec![2.0; n], &vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn homogeneous_fixed_point() {
        let h = MultigridHierarchy::new(
            laplacian(31),
            GridShape::Line(31),
            SmootherSpec::damped_jacobi(),
        )
        .unwrap();
        let x = h.v_cycle(0, &[0.0; 31], &[0.0; 31]).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn level_sizes_decrease_to_threshold() {
        let h = MultigridHierarchy::new(
            laplacian(127),
            GridShape::Line(127),
            SmootherSpec::damped_jacobi(),
        )
        .unwrap();
        assert_eq!(h.level_dims(), vec![127, 63, 31, 15, 7]);
        let h = MultigridHierarchy::new(
            laplacian(32),
            GridShape::Line(32),
            SmootherSpec::damped_jacobi(),
        )
        .unwrap();
        assert_eq!(h.level_dims(), vec![32, 16, 8, 4]);
    }

    #[test]
    fn small_systems_are_solved_directly() {
        let h = MultigridHierarchy::new(
            laplacian(5),
            GridShape::Line(5),
            SmootherSpec::damped_jacobi(),
        )
        .unwrap();
        assert_eq!(h.depth(), 1);
        let b = [1.0, 0.0, 0.0, 0.0, 1.0];
        let x = h.v_cycle(0, &[0.0; 5], &b).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn preconditioner_is_deterministic() {
        let h = MultigridHierarchy::new(
            laplacian(63),
            GridShape::Line(63),
            SmootherSpec::damped_jacobi(),
        )
        .unwrap();
        let m = VCyclePreconditioner::new(h);
        let r: Vec<f64> = (0..63).map(|i| (i as f64).sin()).collect();
        let mut z1 = vec![0.0; 63];
        let mut z2 = vec![0.0; 63];
        m.apply(&r, &mut z1);
        m.apply(&r, &mut z2);
        assert_eq!(z1, z2);
    }

    #[test]
    fn bad_level_is_rejected() {
        let h = MultigridHierarchy::new(
            laplacian(15),
            GridShape::Line(15),
            SmootherSpec::damped_jacobi(),
        )
        .unwrap();
        assert!(h.v_cycle(5, &[0.0; 15], &[0.0; 15]).is_err());
        assert!(h.v_cycle(0, &[0.0; 14], &[0.0; 15]).is_err());
    }
}
