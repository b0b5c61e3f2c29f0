use super::JacobianBlocks;
use crate::error::{Result, SolverError};
use crate::linalg::{BandedMatrix, Preconditioner};
use crate::multigrid::{
    GridShape, MgmPreconditioner, MultigridHierarchy, SmootherSpec, VCyclePreconditioner,
};

/// Approximate solve with `Jss` inside the block preconditioner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerSolve {
    OneVCycle,
    MgmToConvergence {
        rtol: f64,
        max_cycles: usize,
    },
    /// Dense LU; for small diagnostic problems.
    Exact,
}

/// Block upper-triangular preconditioner `P = [[Jss, Jsc], [0, Jcc]]`.
///
/// `apply` performs `y_c = Jcc^-1 b_c`, then `y_s ≈ Jss^-1 (b_s - Jsc y_c)`.
pub struct BlockTriangularPreconditioner {
    jsc: BandedMatrix,
    jcc_inv: Vec<f64>,
    inner: Box<dyn Preconditioner>,
}

impl BlockTriangularPreconditioner {
    pub fn new(blocks: &JacobianBlocks, shape: GridShape, inner: InnerSolve) -> Result<Self> {
        let jcc_inv = blocks
            .jcc
            .iter()
            .enumerate()
            .map(|(row, &d)| {
                if d == 0.0 || !d.is_finite() {
                    Err(SolverError::ZeroDiagonal { row })
                } else {
                    Ok(1.0 / d)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let jss = blocks.jss.clone();
        let inner: Box<dyn Preconditioner> = match inner {
            InnerSolve::Exact => Box::new(jss.to_dense().lu()?),
            InnerSolve::OneVCycle => Box::new(VCyclePreconditioner::new(MultigridHierarchy::new(
                jss,
                shape,
                SmootherSpec::default_for(shape),
            )?)),
            InnerSolve::MgmToConvergence { rtol, max_cycles } => Box::new(MgmPreconditioner::new(
                MultigridHierarchy::new(jss, shape, SmootherSpec::default_for(shape))?,
                rtol,
                max_cycles,
            )),
        };
        Ok(Self {
            jsc: blocks.jsc.clone(),
            jcc_inv,
            inner,
        })
    }
}

impl Preconditioner for BlockTriangularPreconditioner {
    fn dim(&self) -> usize {
        2 * self.jcc_inv.len()
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = self.jcc_inv.len();
        let (rs, rc) = r.split_at(n);
        let (zs, zc) = z.split_at_mut(n);
        for ((z, r), d) in zc.iter_mut().zip(rc).zip(&self.jcc_inv) {
            *z = r * d;
        }
        let mut t = vec![0.0; n];
        self.jsc.matvec_into(zc, &mut t);
        for (ti, ri) in t.iter_mut().zip(rs) {
            *ti = ri - *ti;
        }
        self.inner.apply(&t, zs);
    }

    fn inner_cycles(&self) -> usize {
        self.inner.inner_cycles()
    }
}
