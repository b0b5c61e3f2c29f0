use super::{
    front_position, BlockTriangularPreconditioner, InnerSolve, LevelTerms, SulfationModel,
};
use crate::error::{Result, SolverError};
use crate::newton::{
    newton_solve, timestep_guard, warm_start, Linearization, NewtonReport, NonlinearProblem,
};
use crate::porous::Dimension;
use crate::record::RunRecord;
use crate::solver::{PreconditionerMode, Scheme, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SulfationState {
    pub t: f64,
    /// SO2 concentration on the nodes.
    pub s: Vec<f64>,
    /// Carbonate concentration on the cells.
    pub c: Vec<f64>,
}

impl SulfationState {
    /// `s = 0`, `c = c0` at `t = 0`.
    pub fn initial(model: &SulfationModel) -> Self {
        let n = model.field_len();
        Self {
            t: 0.0,
            s: vec![0.0; n],
            c: vec![model.params.c0; n],
        }
    }
}

/// One implicit time level as a nonlinear problem in `[s; c]`.
pub struct SulfationStepProblem<'a> {
    model: &'a SulfationModel,
    c_prev: &'a [f64],
    prev: LevelTerms,
    dt: f64,
    scheme: Scheme,
    solver: &'a SolverConfig,
}

impl<'a> SulfationStepProblem<'a> {
    pub fn new(
        model: &'a SulfationModel,
        state: &'a SulfationState,
        dt: f64,
        scheme: Scheme,
        solver: &'a SolverConfig,
    ) -> Result<Self> {
        Ok(Self {
            prev: model.level_terms(&state.s, &state.c)?,
            model,
            c_prev: &state.c,
            dt,
            scheme,
            solver,
        })
    }
}

impl NonlinearProblem for SulfationStepProblem<'_> {
    fn dim(&self) -> usize {
        2 * self.model.field_len()
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let (s, c) = u.split_at(self.model.field_len());
        self.model
            .residual_with(s, c, self.c_prev, &self.prev, self.dt, self.scheme)
            .unwrap_or_else(|_| vec![f64::NAN; u.len()])
    }

    fn linearize(&self, u: &[f64]) -> Result<Linearization> {
        let (s, c) = u.split_at(self.model.field_len());
        let blocks = self.model.assemble_jacobian(s, c, self.dt, self.scheme)?;
        let inner = match self.solver.preconditioner {
            PreconditionerMode::None => None,
            PreconditionerMode::OneVCycle => Some(InnerSolve::OneVCycle),
            PreconditionerMode::MgmToConvergence => Some(InnerSolve::MgmToConvergence {
                rtol: self.solver.inner_rtol,
                max_cycles: self.solver.inner_max_cycles,
            }),
        };
        let preconditioner = match inner {
            None => None,
            Some(inner) => Some(Box::new(BlockTriangularPreconditioner::new(
                &blocks,
                self.model.grid.shape(),
                inner,
            )?) as Box<dyn crate::linalg::Preconditioner>),
        };
        Ok(Linearization {
            jacobian: Box::new(blocks),
            preconditioner,
        })
    }
}

/// One explicit Euler step, used by the averaged warm start.
fn explicit_euler(model: &SulfationModel, u: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = model.field_len();
    let (s, c) = u.split_at(n);
    let terms = model.level_terms(s, c)?;
    let weights = model.level_terms(&vec![1.0; n], c)?.storage;
    let mut out = Vec::with_capacity(2 * n);
    out.extend((0..n).map(|j| s[j] - dt * terms.rate_s[j] / weights[j]));
    out.extend((0..n).map(|k| c[k] - dt * terms.rate_c[k]));
    Ok(out)
}

/// Advances `state` by `dt`. Newton non-convergence is an error.
pub fn step(
    model: &SulfationModel,
    state: &SulfationState,
    dt: f64,
    scheme: Scheme,
    solver: &SolverConfig,
) -> Result<(SulfationState, NewtonReport)> {
    solver.validate()?;
    if !(dt > 0.0) {
        return Err(SolverError::InvalidArgument(format!(
            "timestep must be positive, got {dt}"
        )));
    }
    if let Some(c) = solver.newton.timestep_guard {
        let h = model.grid.h();
        if !timestep_guard(dt, h, c) {
            return Err(SolverError::TimestepGuard { dt, h, c });
        }
    }
    let problem = SulfationStepProblem::new(model, state, dt, scheme, solver)?;
    let n = model.field_len();
    let mut u_prev = state.s.clone();
    u_prev.extend_from_slice(&state.c);
    let explicit =
        |u: &[f64]| explicit_euler(model, u, dt).unwrap_or_else(|_| vec![f64::NAN; u.len()]);
    let u0 = warm_start(&u_prev, solver.newton.warm_start, Some(&explicit))?;
    let (u, report) = newton_solve(&problem, &u0, &solver.newton, &solver.linear)?;
    if !report.converged {
        return Err(SolverError::NewtonNotConverged {
            iterations: report.iterations,
            last_increment: report.increment_norms.last().copied().unwrap_or(f64::NAN),
        });
    }
    let (s, c) = u.split_at(n);
    Ok((
        SulfationState {
            t: state.t + dt,
            s: s.to_vec(),
            c: c.to_vec(),
        },
        report,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SulfationPlan {
    pub elapsed: f64,
    /// Requested step; the actual step is `elapsed / ceil(elapsed / dt)`.
    pub dt: f64,
    pub scheme: Scheme,
    /// Times at which to keep a copy of the state (rounded to the nearest step).
    pub snapshot_times: Vec<f64>,
    /// Record the front position after every step (1D only).
    pub track_front: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SulfationRun {
    pub final_state: SulfationState,
    pub snapshots: Vec<SulfationState>,
    pub records: Vec<RunRecord>,
}

/// Integrates from `initial`; failures carry the index and start time of the failing step.
pub fn integrate(
    model: &SulfationModel,
    initial: SulfationState,
    plan: &SulfationPlan,
    solver: &SolverConfig,
) -> Result<SulfationRun> {
    if !(plan.dt > 0.0) || !(plan.elapsed >= 0.0) {
        return Err(SolverError::InvalidArgument(format!(
            "need dt > 0 and elapsed >= 0, got dt = {} and elapsed = {}",
            plan.dt, plan.elapsed
        )));
    }
    if plan.track_front && model.grid.dimension() != Dimension::One {
        return Err(SolverError::InvalidArgument(
            "front tracking is one-dimensional only".into(),
        ));
    }
    let steps = if plan.elapsed == 0.0 {
        0
    } else {
        (plan.elapsed / plan.dt - 1e-9).ceil().max(1.0) as usize
    };
    let dt = if steps == 0 {
        plan.dt
    } else {
        plan.elapsed / steps as f64
    };
    let snapshot_steps: Vec<usize> = plan
        .snapshot_times
        .iter()
        .map(|&ts| ((ts - initial.t) / dt).round().clamp(0.0, steps as f64) as usize)
        .collect();
    let mut snapshots = vec![None; snapshot_steps.len()];
    let mut take = |k: usize, state: &SulfationState| {
        for (slot, &want) in snapshots.iter_mut().zip(&snapshot_steps) {
            if want == k {
                *slot = Some(state.clone());
            }
        }
    };
    let mut state = initial;
    take(0, &state);
    let mut records = Vec::with_capacity(steps);
    for k in 1..=steps {
        let (next, report) =
            step(model, &state, dt, plan.scheme, solver).map_err(|e| SolverError::Step {
                step: k,
                t: state.t,
                source: Box::new(e),
            })?;
        state = next;
        let mut rec = RunRecord::from_report(k, state.t, &report);
        if plan.track_front {
            rec.front = match front_position(&state.c, &model.grid) {
                Ok(x) => Some(x),
                Err(SolverError::NoFront) => None,
                Err(e) => return Err(e),
            };
        }
        records.push(rec);
        take(k, &state);
    }
    Ok(SulfationRun {
        final_state: state,
        snapshots: snapshots
            .into_iter()
            .map(|s| s.expect("every snapshot step is visited"))
            .collect(),
        records,
    })
}
