#![allow(dead_code)]

use degpar::linalg::{BandedMatrix, DenseMatrix};
use nalgebra::DMatrix;

pub fn banded_to_na(a: &BandedMatrix) -> DMatrix<f64> {
    let n = a.order();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        a.for_each_in_row(i, |j, v| m[(i, j)] += v);
    }
    m
}

pub fn dense_to_na(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Checks every column of `jac` against forward differences of `f`:
/// `|(F(u + eps e_i) - F(u)) / eps - J e_i|_inf <= 1e-5 (1 + |J e_i|_inf)`
/// with `eps = 1e-7 (1 + |u|_inf)`. Returns the worst ratio of error to bound.
pub fn fd_jacobian_check(f: impl Fn(&[f64]) -> Vec<f64>, jac: &DMatrix<f64>, u: &[f64]) -> f64 {
    let eps = 1e-7 * (1.0 + norm_inf(u));
    let f0 = f(u);
    let mut worst: f64 = 0.0;
    for i in 0..u.len() {
        let mut up = u.to_vec();
        up[i] += eps;
        let f1 = f(&up);
        let col: Vec<f64> = (0..f0.len()).map(|r| jac[(r, i)]).collect();
        let err = (0..f0.len())
            .map(|r| ((f1[r] - f0[r]) / eps - col[r]).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err / (1e-5 * (1.0 + norm_inf(&col))));
    }
    worst
}
