use super::{barenblatt, PorousModel};
use crate::error::{Result, SolverError};
use crate::newton::{
    newton_solve, timestep_guard, warm_start, Linearization, NewtonReport, NonlinearProblem,
};
use crate::record::RunRecord;
use crate::solver::{multigrid_preconditioner, Scheme, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct PorousState {
    pub t: f64,
    pub u: Vec<f64>,
}

impl PorousState {
    /// Barenblatt profile with exponent `m` sampled at time `t`.
    pub fn barenblatt(model: &PorousModel, m: f64, t: f64) -> Result<Self> {
        let u = (0..model.dim())
            .map(|k| barenblatt(t, &model.grid.point(k), m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { t, u })
    }

    /// Discrete mass `h^d * sum(u)`.
    pub fn mass(&self, model: &PorousModel) -> f64 {
        model.grid.cell_volume() * self.u.iter().sum::<f64>()
    }
}

/// One implicit time level as a nonlinear problem in `u^n`.
pub struct PorousStepProblem<'a> {
    model: &'a PorousModel,
    u_prev: &'a [f64],
    prev_diffusion: Vec<f64>,
    dt: f64,
    scheme: Scheme,
    solver: &'a SolverConfig,
}

impl<'a> PorousStepProblem<'a> {
    pub fn new(
        model: &'a PorousModel,
        u_prev: &'a [f64],
        dt: f64,
        scheme: Scheme,
        solver: &'a SolverConfig,
    ) -> Result<Self> {
        Ok(Self {
            prev_diffusion: model.diffusion(u_prev)?,
            model,
            u_prev,
            dt,
            scheme,
            solver,
        })
    }
}

impl NonlinearProblem for PorousStepProblem<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        self.model
            .residual_with(u, self.u_prev, &self.prev_diffusion, self.dt, self.scheme)
            .unwrap_or_else(|_| vec![f64::NAN; u.len()])
    }

    fn linearize(&self, u: &[f64]) -> Result<Linearization> {
        let x = self.model.x_n(u, self.dt, self.scheme)?;
        let y = self.model.y_n(u, self.dt, self.scheme)?;
        let jacobian = x.linear_combination(1.0, &y, 1.0)?;
        Ok(Linearization {
            jacobian: Box::new(jacobian),
            preconditioner: multigrid_preconditioner(x, self.model.grid.shape(), self.solver)?,
        })
    }
}

/// Advances `state` by `dt`. Newton non-convergence is an error.
pub fn step(
    model: &PorousModel,
    state: &PorousState,
    dt: f64,
    scheme: Scheme,
    solver: &SolverConfig,
) -> Result<(PorousState, NewtonReport)> {
    solver.validate()?;
    if !(dt >= 0.0) {
        return Err(SolverError::InvalidArgument(format!(
            "negative timestep {dt}"
        )));
    }
    let h = model.grid.h();
    if let Some(c) = solver.newton.timestep_guard {
        if !timestep_guard(dt, h, c) {
            return Err(SolverError::TimestepGuard { dt, h, c });
        }
    }
    let problem = PorousStepProblem::new(model, &state.u, dt, scheme, solver)?;
    let r = model.ratio(dt);
    let explicit = |u: &[f64]| -> Vec<f64> {
        match model.diffusion(u) {
            Ok(du) => u.iter().zip(&du).map(|(a, b)| a + r * b).collect(),
            Err(_) => vec![f64::NAN; u.len()],
        }
    };
    let u0 = warm_start(&state.u, solver.newton.warm_start, Some(&explicit))?;
    let (u, report) = newton_solve(&problem, &u0, &solver.newton, &solver.linear)?;
    if !report.converged {
        return Err(SolverError::NewtonNotConverged {
            iterations: report.iterations,
            last_increment: report.increment_norms.last().copied().unwrap_or(f64::NAN),
        });
    }
    Ok((PorousState { t: state.t + dt, u }, report))
}

/// Uniform step `dt = T / ceil(T / (lambda h))`, or `None` for `T = 0`.
pub fn uniform_timestep(elapsed: f64, lambda: f64, h: f64) -> Option<(f64, usize)> {
    if elapsed <= 0.0 {
        return None;
    }
    let steps = (elapsed / (lambda * h)).ceil().max(1.0) as usize;
    Some((elapsed / steps as f64, steps))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationPlan {
    pub elapsed: f64,
    /// Timestep ratio `lambda` in `dt ≈ lambda h`.
    pub lambda: f64,
    pub scheme: Scheme,
    /// Barenblatt exponent for per-step error records, if the run has one.
    pub reference_m: Option<f64>,
}

/// Integrates from `initial` over `plan.elapsed` with uniform steps.
/// Failures are reported with the index and start time of the failing step.
pub fn integrate(
    model: &PorousModel,
    initial: PorousState,
    plan: &IntegrationPlan,
    solver: &SolverConfig,
) -> Result<(PorousState, Vec<RunRecord>)> {
    if !(plan.lambda > 0.0) {
        return Err(SolverError::InvalidArgument(format!(
            "timestep ratio must be positive, got {}",
            plan.lambda
        )));
    }
    let Some((dt, steps)) = uniform_timestep(plan.elapsed, plan.lambda, model.grid.h()) else {
        return Ok((initial, Vec::new()));
    };
    let mut state = initial;
    let mut records = Vec::with_capacity(steps);
    for n in 1..=steps {
        let (next, report) =
            step(model, &state, dt, plan.scheme, solver).map_err(|e| SolverError::Step {
                step: n,
                t: state.t,
                source: Box::new(e),
            })?;
        state = next;
        let mut rec = RunRecord::from_report(n, state.t, &report);
        if let Some(m) = plan.reference_m {
            let (l1, linf) = error_vs_exact(&state, m, model)?;
            rec.l1_error = Some(l1);
            rec.linf_error = Some(linf);
        }
        records.push(rec);
    }
    Ok((state, records))
}

/// `(h^d sum |U - u|, max |U - u|)` against the Barenblatt profile at `state.t`.
pub fn error_vs_exact(state: &PorousState, m: f64, model: &PorousModel) -> Result<(f64, f64)> {
    let mut l1 = 0.0;
    let mut linf = 0.0_f64;
    for (k, &v) in state.u.iter().enumerate() {
        let e = (barenblatt(state.t, &model.grid.point(k), m)? - v).abs();
        l1 += e;
        linf = linf.max(e);
    }
    Ok((l1 * model.grid.cell_volume(), linf))
}
