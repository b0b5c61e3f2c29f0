//! Square matrices stored by diagonals.
//!
//! Entry `i` of the diagonal at offset `k` holds `A[r, r + k]` with
//! `r = i + max(0, -k)`, so every diagonal has exactly `n - |k|` entries.
//! Tridiagonal (1D), pentadiagonal (2D five-point) and the nine-point
//! Galerkin coarse operators all fit this layout.

use super::{DenseMatrix, LinearOperator};
use crate::error::{Result, SolverError};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    order: usize,
    offsets: Vec<isize>,
    diagonals: Vec<Vec<f64>>,
}

impl BandedMatrix {
    /// Zero matrix with the given diagonal offsets (sorted and deduplicated).
    pub fn zeros(order: usize, offsets: &[isize]) -> Self {
        let mut offsets: Vec<isize> = offsets
            .iter()
            .copied()
            .filter(|k| k.unsigned_abs() < order)
            .collect();
        offsets.sort_unstable();
        offsets.dedup();
        let diagonals = offsets
            .iter()
            .map(|k| vec![0.0; order - k.unsigned_abs()])
            .collect();
        Self {
            order,
            offsets,
            diagonals,
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_diagonal(&vec![1.0; order])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self {
            order: diag.len(),
            offsets: vec![0],
            diagonals: vec![diag.to_vec()],
        }
    }

    /// Tridiagonal matrix from its lower, main and upper diagonals.
    pub fn tridiagonal(lower: &[f64], main: &[f64], upper: &[f64]) -> Result<Self> {
        let n = main.len();
        for d in [lower, upper] {
            if d.len() + 1 != n {
                return Err(SolverError::DimensionMismatch {
                    expected: n.saturating_sub(1),
                    found: d.len(),
                });
            }
        }
        Ok(Self {
            order: n,
            offsets: vec![-1, 0, 1],
            diagonals: vec![lower.to_vec(), main.to_vec(), upper.to_vec()],
        })
    }

    /// Builds a banded matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(order: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut offsets: Vec<isize> = triplets
            .iter()
            .map(|&(i, j, _)| j as isize - i as isize)
            .collect();
        offsets.push(0);
        let mut m = Self::zeros(order, &offsets);
        for &(i, j, v) in triplets {
            m.add(i, j, v);
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn offsets(&self) -> &[isize] {
        &self.offsets
    }

    pub fn diagonal_at(&self, offset: isize) -> Option<&[f64]> {
        self.slot(offset).map(|s| self.diagonals[s].as_slice())
    }

    fn slot(&self, offset: isize) -> Option<usize> {
        self.offsets.binary_search(&offset).ok()
    }

    #[inline]
    fn position(offset: isize, row: usize) -> usize {
        if offset < 0 {
            row - offset.unsigned_abs()
        } else {
            row
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let k = col as isize - row as isize;
        match self.slot(k) {
            Some(s) => self.diagonals[s][Self::position(k, row)],
            None => 0.0,
        }
    }

    /// Adds `value` at `(row, col)`.
    ///
    /// Panics if the offset of `(row, col)` is not part of the stored band.
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        let k = col as isize - row as isize;
        let s = self
            .slot(k)
            .unwrap_or_else(|| panic!("offset {k} not in band {:?}", self.offsets));
        self.diagonals[s][Self::position(k, row)] += value;
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        let k = col as isize - row as isize;
        let s = self
            .slot(k)
            .unwrap_or_else(|| panic!("offset {k} not in band {:?}", self.offsets));
        self.diagonals[s][Self::position(k, row)] = value;
    }

    /// Main diagonal as a dense vector.
    pub fn main_diagonal(&self) -> Vec<f64> {
        match self.slot(0) {
            Some(s) => self.diagonals[s].clone(),
            None => vec![0.0; self.order],
        }
    }

    /// Calls `f(col, value)` for every stored entry of `row`.
    #[inline]
    pub fn for_each_in_row(&self, row: usize, mut f: impl FnMut(usize, f64)) {
        for (s, &k) in self.offsets.iter().enumerate() {
            let col = row as isize + k;
            if col < 0 || col >= self.order as isize {
                continue;
            }
            f(col as usize, self.diagonals[s][Self::position(k, row)]);
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.order {
            return Err(SolverError::DimensionMismatch {
                expected: self.order,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.order];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` without dimension checks beyond debug assertions.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.order);
        debug_assert_eq!(y.len(), self.order);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (k, diag) in self.offsets.iter().zip(&self.diagonals) {
            let shift = k.unsigned_abs();
            if *k >= 0 {
                for ((yi, d), xi) in y.iter_mut().zip(diag).zip(&x[shift..]) {
                    *yi += d * xi;
                }
            } else {
                for ((yi, d), xi) in y[shift..].iter_mut().zip(diag).zip(x) {
                    *yi += d * xi;
                }
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(
            self.order,
            &self.offsets.iter().map(|k| -k).collect::<Vec<_>>(),
        );
        for (k, diag) in self.offsets.iter().zip(&self.diagonals) {
            let s = t.slot(-k).expect("mirrored offset");
            t.diagonals[s].copy_from_slice(diag);
        }
        t
    }

    pub fn scale(&mut self, alpha: f64) {
        for d in &mut self.diagonals {
            d.iter_mut().for_each(|v| *v *= alpha);
        }
    }

    /// `alpha * self + beta * other` over the union of both bands.
    pub fn linear_combination(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.order != other.order {
            return Err(SolverError::DimensionMismatch {
                expected: self.order,
                found: other.order,
            });
        }
        let offsets: Vec<isize> = self.offsets.iter().chain(&other.offsets).copied().collect();
        let mut out = Self::zeros(self.order, &offsets);
        for (src, w) in [(self, alpha), (other, beta)] {
            for (k, diag) in src.offsets.iter().zip(&src.diagonals) {
                let s = out.slot(*k).expect("union offset");
                for (o, v) in out.diagonals[s].iter_mut().zip(diag) {
                    *o += w * v;
                }
            }
        }
        Ok(out)
    }

    /// Right-multiplies by `diag(d)`, i.e. scales column `j` by `d[j]`.
    pub fn scale_columns(&mut self, d: &[f64]) {
        assert_eq!(d.len(), self.order);
        for (k, diag) in self.offsets.iter().zip(&mut self.diagonals) {
            let row0 = if *k < 0 { k.unsigned_abs() } else { 0 };
            for (i, v) in diag.iter_mut().enumerate() {
                let col = (row0 + i) as isize + k;
                *v *= d[col as usize];
            }
        }
    }

    /// Checks `|A[i,j] - A[j,i]| <= tol` for every stored pair.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.offsets
            .iter()
            .zip(&self.diagonals)
            .all(|(k, diag)| match self.slot(-k) {
                Some(s) => diag
                    .iter()
                    .zip(&self.diagonals[s])
                    .all(|(a, b)| (a - b).abs() <= tol),
                None => diag.iter().all(|v| v.abs() <= tol),
            })
    }

    pub fn max_abs(&self) -> f64 {
        self.diagonals
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.diagonals.iter().flatten().all(|v| v.is_finite())
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.order, self.order);
        for row in 0..self.order {
            self.for_each_in_row(row, |col, v| a[(row, col)] += v);
        }
        a
    }
}

impl LinearOperator for BandedMatrix {
    fn dim(&self) -> usize {
        self.order
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_matvec() {
        let a = BandedMatrix::identity(3);
        assert_eq!(a.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn laplacian_stencil_on_constant() {
        let a = BandedMatrix::tridiagonal(&[1.0, 1.0], &[-2.0; 3], &[1.0, 1.0]).unwrap();
        assert_eq!(a.matvec(&[1.0; 3]).unwrap(), vec![-1.0, 0.0, -1.0]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = BandedMatrix::identity(3);
        assert!(matches!(
            a.matvec(&[1.0; 4]),
            Err(SolverError::DimensionMismatch {
                expected: 3,
                found: 4
            })
        ));
    }

    #[test]
    fn storage_layout_matches_definition() {
        let mut a = BandedMatrix::zeros(4, &[-2, 1]);
        a.set(2, 0, 5.0);
        a.set(0, 1, 7.0);
        assert_eq!(a.diagonal_at(-2).unwrap(), &[5.0, 0.0]);
        assert_eq!(a.diagonal_at(1).unwrap(), &[7.0, 0.0, 0.0]);
        assert_eq!(a.get(2, 0), 5.0);
        assert_eq!(a.get(3, 3), 0.0);
    }

    #[test]
    fn transpose_and_symmetry() {
        let a = BandedMatrix::tridiagonal(&[1.0, 2.0], &[0.0; 3], &[3.0, 4.0]).unwrap();
        let t = a.transpose();
        assert_eq!(t.get(0, 1), 1.0);
        assert_eq!(t.get(1, 0), 3.0);
        assert!(!a.is_symmetric(0.0));
        let s = a.linear_combination(1.0, &t, 1.0).unwrap();
        assert!(s.is_symmetric(0.0));
    }

    #[test]
    fn column_scaling() {
        let mut a = BandedMatrix::tridiagonal(&[1.0, 1.0], &[1.0; 3], &[1.0, 1.0]).unwrap();
        a.scale_columns(&[1.0, 2.0, 3.0]);
        assert_eq!(a.get(0, 1), 2.0);
        assert_eq!(a.get(2, 1), 2.0);
        assert_eq!(a.get(1, 2), 3.0);
        assert_eq!(a.get(0, 0), 1.0);
    }
}
