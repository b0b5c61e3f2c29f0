//! Plain Newton iteration with Krylov inner solves.
//!
//! Each iterate solves `F'(u) v = -F(u)` with preconditioned GMRES and sets
//! `u <- u + v`. Iteration stops when `|v|_inf <= tol`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::linalg::{
    all_finite, gmres, norm_inf, GmresConfig, KrylovReport, LinearOperator, Preconditioner,
};

/// Jacobian and optional preconditioner at a given iterate.
pub struct Linearization {
    pub jacobian: Box<dyn LinearOperator>,
    pub preconditioner: Option<Box<dyn Preconditioner>>,
}

pub trait NonlinearProblem {
    fn dim(&self) -> usize;

    fn residual(&self, u: &[f64]) -> Vec<f64>;

    fn linearize(&self, u: &[f64]) -> Result<Linearization>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarmStart {
    /// `u^{n,0} = u^{n-1}`
    #[default]
    PreviousStep,
    /// Average of `u^{n-1}` and one explicit Euler step from it.
    ExplicitEulerAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub warm_start: WarmStart,
    /// `Some(C)` enforces `dt <= C h` before each step.
    pub timestep_guard: Option<f64>,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 30,
            warm_start: WarmStart::PreviousStep,
            timestep_guard: None,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(SolverError::InvalidArgument(format!(
                "Newton tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(SolverError::InvalidArgument(
                "Newton needs at least one iteration".into(),
            ));
        }
        if let Some(c) = self.timestep_guard {
            if !(c > 0.0) {
                return Err(SolverError::InvalidArgument(format!(
                    "timestep guard constant must be positive, got {c}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    /// `|u^{s} - u^{s-1}|_inf` for each iterate.
    pub increment_norms: Vec<f64>,
    pub linear: Vec<KrylovReport>,
    pub converged: bool,
}

impl NewtonReport {
    /// Minimum, mean and maximum GMRES iterations over the Newton steps.
    pub fn gmres_stats(&self) -> (usize, f64, usize) {
        let its: Vec<usize> = self.linear.iter().map(|r| r.iterations).collect();
        match (its.iter().min(), its.iter().max()) {
            (Some(&lo), Some(&hi)) => (lo, its.iter().sum::<usize>() as f64 / its.len() as f64, hi),
            _ => (0, 0.0, 0),
        }
    }
}

/// Runs Newton from `u0`. A report with `converged == false` is returned when
/// `max_iter` is exhausted; linear-solver failures and non-finite residuals are errors.
pub fn newton_solve<P>(
    problem: &P,
    u0: &[f64],
    cfg: &NewtonConfig,
    linear: &GmresConfig,
) -> Result<(Vec<f64>, NewtonReport)>
where
    P: NonlinearProblem + ?Sized,
{
    cfg.validate()?;
    let n = problem.dim();
    if u0.len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            found: u0.len(),
        });
    }
    if !all_finite(u0) {
        return Err(SolverError::NonFinite {
            context: "Newton initial guess",
        });
    }
    let mut u = u0.to_vec();
    let mut report = NewtonReport::default();
    let zero = vec![0.0; n];
    for s in 1..=cfg.max_iter {
        let f = problem.residual(&u);
        if !all_finite(&f) {
            return Err(SolverError::Diverged { iteration: s });
        }
        let lin = problem.linearize(&u).map_err(|e| SolverError::Linear {
            iteration: s,
            source: Box::new(e),
        })?;
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let (v, krylov) = gmres(
            lin.jacobian.as_ref(),
            lin.preconditioner.as_deref(),
            &rhs,
            &zero,
            linear,
        )
        .map_err(|e| SolverError::Linear {
            iteration: s,
            source: Box::new(e),
        })?;
        if !krylov.converged {
            return Err(SolverError::Linear {
                iteration: s,
                source: Box::new(SolverError::LinearNotConverged {
                    iterations: krylov.iterations,
                    relative_residual: krylov.relative_residual(),
                }),
            });
        }
        for (ui, vi) in u.iter_mut().zip(&v) {
            *ui += vi;
        }
        let inc = norm_inf(&v);
        report.iterations = s;
        report.increment_norms.push(inc);
        report.linear.push(krylov);
        if !inc.is_finite() || !all_finite(&u) {
            return Err(SolverError::Diverged { iteration: s });
        }
        if inc <= cfg.tol {
            report.converged = true;
            break;
        }
    }
    Ok((u, report))
}

/// One explicit Euler step from the given state.
pub type ExplicitStep<'a> = &'a dyn Fn(&[f64]) -> Vec<f64>;

/// Initial Newton guess for a new time level.
///
/// `explicit_step` maps `u_prev` to one explicit Euler step from it; it is
/// only consulted in [`WarmStart::ExplicitEulerAverage`] mode.
pub fn warm_start(
    u_prev: &[f64],
    mode: WarmStart,
    explicit_step: Option<ExplicitStep<'_>>,
) -> Result<Vec<f64>> {
    match mode {
        WarmStart::PreviousStep => Ok(u_prev.to_vec()),
        WarmStart::ExplicitEulerAverage => {
            let step = explicit_step.ok_or_else(|| {
                SolverError::InvalidArgument(
                    "explicit-euler-average warm start needs an explicit step".into(),
                )
            })?;
            let e = step(u_prev);
            if e.len() != u_prev.len() {
                return Err(SolverError::DimensionMismatch {
                    expected: u_prev.len(),
                    found: e.len(),
                });
            }
            Ok(u_prev.iter().zip(&e).map(|(a, b)| 0.5 * (a + b)).collect())
        }
    }
}

/// `dt <= C h`; the boundary case is accepted up to rounding, since uniform
/// steps `T / ceil(T / h)` can land one ulp above `h`.
pub fn timestep_guard(dt: f64, h: f64, c: f64) -> bool {
    dt <= c * h * (1.0 + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{BandedMatrix, FnOperator};

    struct Affine {
        b: Vec<f64>,
    }

    impl NonlinearProblem for Affine {
        fn dim(&self) -> usize {
            self.b.len()
        }
        fn residual(&self, u: &[f64]) -> Vec<f64> {
            u.iter().zip(&self.b).map(|(a, b)| a - b).collect()
        }
        fn linearize(&self, _u: &[f64]) -> Result<Linearization> {
            Ok(Linearization {
                jacobian: Box::new(BandedMatrix::identity(self.b.len())),
                preconditioner: None,
            })
        }
    }

    /// Componentwise `u^2 - 4`.
    struct Square(usize);

    impl NonlinearProblem for Square {
        fn dim(&self) -> usize {
            self.0
        }
        fn residual(&self, u: &[f64]) -> Vec<f64> {
            u.iter().map(|x| x * x - 4.0).collect()
        }
        fn linearize(&self, u: &[f64]) -> Result<Linearization> {
            let d: Vec<f64> = u.iter().map(|x| 2.0 * x).collect();
            Ok(Linearization {
                jacobian: Box::new(FnOperator::new(self.0, move |x: &[f64], y: &mut [f64]| {
                    for ((yi, xi), di) in y.iter_mut().zip(x).zip(&d) {
                        *yi = di * xi;
                    }
                })),
                preconditioner: None,
            })
        }
    }

    #[test]
    fn affine_problem_takes_one_step() {
        let p = Affine {
            b: vec![1.0, -2.0, 0.5],
        };
        let (u, rep) = newton_solve(
            &p,
            &[0.0; 3],
            &NewtonConfig::default(),
            &GmresConfig::default(),
        )
        .unwrap();
        // first step lands on b, second confirms a zero increment
        assert!(rep.converged);
        assert!(rep.iterations <= 2);
        assert!(rep.increment_norms[rep.iterations - 1] <= 1e-6);
        for (ui, bi) in u.iter().zip(&p.b) {
            assert!((ui - bi).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_root_is_detected_in_one_iteration() {
        let p = Affine { b: vec![1.0, 2.0] };
        let (_, rep) = newton_solve(
            &p,
            &[1.0, 2.0],
            &NewtonConfig::default(),
            &GmresConfig::default(),
        )
        .unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        assert_eq!(rep.increment_norms, vec![0.0]);
    }

    #[test]
    fn quadratic_convergence_on_scalar_square() {
        // Scalar oracle: x_{k+1} = (x_k + 4 / x_k) / 2 from x = 3.
        let mut x = 3.0_f64;
        let mut oracle = Vec::new();
        for _ in 0..5 {
            let nx = 0.5 * (x + 4.0 / x);
            oracle.push((nx - x).abs());
            x = nx;
        }
        let cfg = NewtonConfig {
            tol: 1e-12,
            ..NewtonConfig::default()
        };
        let (u, rep) = newton_solve(&Square(4), &[3.0; 4], &cfg, &GmresConfig::default()).unwrap();
        assert!(rep.converged);
        for v in u {
            assert!((v - 2.0).abs() < 1e-14);
        }
        for (got, want) in rep.increment_norms.iter().zip(&oracle) {
            assert!((got - want).abs() <= 1e-12 * want.max(1e-300) + 1e-15);
        }
        // e_{k+1} / e_k^2 stays bounded (≈ 1/(2x*) = 1/4 for the increments)
        let inc = &rep.increment_norms;
        for w in inc.windows(2).take(3) {
            assert!(w[1] / (w[0] * w[0]) < 0.3);
        }
        assert!(inc.last().unwrap() < inc.first().unwrap());
    }

    #[test]
    fn non_finite_residual_is_divergence() {
        struct Bad;
        impl NonlinearProblem for Bad {
            fn dim(&self) -> usize {
                1
            }
            fn residual(&self, _u: &[f64]) -> Vec<f64> {
                vec![f64::NAN]
            }
            fn linearize(&self, _u: &[f64]) -> Result<Linearization> {
                unreachable!()
            }
        }
        let r = newton_solve(
            &Bad,
            &[0.0],
            &NewtonConfig::default(),
            &GmresConfig::default(),
        );
        assert!(matches!(r, Err(SolverError::Diverged { iteration: 1 })));
    }

    #[test]
    fn warm_start_modes() {
        let u = [1.0, 2.0];
        assert_eq!(
            warm_start(&u, WarmStart::PreviousStep, None).unwrap(),
            u.to_vec()
        );
        let frozen = |x: &[f64]| x.to_vec();
        assert_eq!(
            warm_start(&u, WarmStart::ExplicitEulerAverage, Some(&frozen)).unwrap(),
            u.to_vec()
        );
        let shift = |x: &[f64]| x.iter().map(|v| v + 2.0).collect::<Vec<_>>();
        assert_eq!(
            warm_start(&u, WarmStart::ExplicitEulerAverage, Some(&shift)).unwrap(),
            vec![2.0, 3.0]
        );
        assert!(warm_start(&u, WarmStart::ExplicitEulerAverage, None).is_err());
    }

    #[test]
    fn guard_is_inclusive() {
        assert!(timestep_guard(0.1, 0.1, 1.0));
        assert!(!timestep_guard(0.2, 0.1, 1.0));
        assert!(timestep_guard(0.05, 0.1, 1.0));
    }

    #[test]
    fn config_validation() {
        assert!(NewtonConfig {
            tol: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(NewtonConfig {
            max_iter: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(NewtonConfig {
            timestep_guard: Some(-1.0),
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
