use super::{ExperimentConfig, Fit, HarnessError, RunOutput, StudyKind, StudyOutput, Table, Value};
use crate::error::SolverError;
use crate::porous::{self, Dirichlet, Grid, IntegrationPlan, PorousModel, PorousState};
use crate::record::{RunRecord, RunSummary};
use crate::solver::{PreconditionerMode, Scheme};
use crate::sulfation::{
    fit_front_slope, least_squares_slope, StaggeredGrid, SulfationModel, SulfationPlan,
    SulfationRun, SulfationState,
};

/// Runs the study named in `cfg`.
pub fn run_study(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    cfg.validate()?;
    match cfg.study {
        StudyKind::PorousConvergence => run_porous_convergence(cfg),
        StudyKind::PorousIterations | StudyKind::SulfationIterations => run_iteration_study(cfg),
        StudyKind::SulfationProfile => run_sulfation_profile(cfg),
        StudyKind::SulfationFront => run_front_tracking(cfg),
        StudyKind::Sulfation2d => run_sulfation_2d(cfg),
    }
}

#[derive(Debug, Clone, Copy)]
struct Job {
    n: usize,
    scheme: Scheme,
    mode: PreconditionerMode,
}

fn empty_output(cfg: &ExperimentConfig) -> StudyOutput {
    StudyOutput {
        study: cfg.study,
        seed: cfg.seed,
        partial: false,
        fits: Vec::new(),
        tables: Vec::new(),
        runs: Vec::new(),
    }
}

/// Runs `jobs` with the configured execution and keeps the successful ones
/// in job order. The first failure, if any, is returned alongside.
fn run_jobs<R: Send>(
    cfg: &ExperimentConfig,
    jobs: &[Job],
    f: impl Fn(&Job) -> Result<R, SolverError> + Sync + Send,
) -> (Vec<(Job, R)>, Option<SolverError>) {
    let mut ok = Vec::new();
    let mut first_err = None;
    for (job, res) in jobs.iter().zip(cfg.execution.map(jobs, f)) {
        match res {
            Ok(r) => ok.push((*job, r)),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    (ok, first_err)
}

fn finish(out: StudyOutput, err: Option<SolverError>) -> Result<StudyOutput, HarnessError> {
    match err {
        None => Ok(out),
        Some(source) => Err(HarnessError::Study {
            partial: Box::new(StudyOutput {
                partial: true,
                ..out
            }),
            source,
        }),
    }
}

fn run_output(job: &Job, records: Vec<RunRecord>) -> RunOutput {
    RunOutput {
        n: job.n,
        scheme: job.scheme,
        preconditioner: job.mode,
        summary: RunSummary::from_records(&records),
        records,
    }
}

/// Slope of `ln y` against `ln n`, if at least two distinct sizes are present.
fn log_log_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, y)| y > 0.0)
        .map(|&(n, y)| ((n as f64).ln(), y.ln()))
        .collect();
    least_squares_slope(&pts).ok()
}

fn porous_model(cfg: &ExperimentConfig, n: usize) -> crate::Result<PorousModel> {
    let p = &cfg.porous;
    let grid = Grid::new(p.dimension, p.domain[0], p.domain[1], n)?;
    PorousModel::new(grid, Dirichlet::homogeneous(&grid), p.diffusivity)
}

fn porous_run(
    cfg: &ExperimentConfig,
    job: &Job,
    errors: bool,
) -> crate::Result<(PorousModel, PorousState, Vec<RunRecord>)> {
    let m = cfg
        .porous
        .diffusivity
        .barenblatt_exponent()
        .expect("validated Barenblatt-compatible diffusivity");
    let model = porous_model(cfg, job.n)?;
    let initial = PorousState::barenblatt(&model, m, cfg.porous.t0)?;
    let plan = IntegrationPlan {
        elapsed: cfg.porous.elapsed,
        lambda: cfg.porous.lambda,
        scheme: job.scheme,
        reference_m: errors.then_some(m),
    };
    let (state, records) = porous::integrate(&model, initial, &plan, &cfg.solver(job.mode))?;
    Ok((model, state, records))
}

fn sulfation_model(cfg: &ExperimentConfig, n: usize) -> crate::Result<SulfationModel> {
    let s = &cfg.sulfation;
    SulfationModel::new(s.params, StaggeredGrid::new(s.dimension, n, s.length)?)
}

fn sulfation_run(
    cfg: &ExperimentConfig,
    job: &Job,
    track_front: bool,
) -> crate::Result<(SulfationModel, SulfationRun)> {
    let model = sulfation_model(cfg, job.n)?;
    let s = &cfg.sulfation;
    let plan = SulfationPlan {
        elapsed: s.elapsed,
        dt: s.dt_over_h * model.grid.h(),
        scheme: job.scheme,
        snapshot_times: s.snapshot_times.clone(),
        track_front,
    };
    let run = crate::sulfation::integrate(
        &model,
        SulfationState::initial(&model),
        &plan,
        &cfg.solver(job.mode),
    )?;
    Ok((model, run))
}

/// Error table `(n, scheme, l1_error, linf_error)` and one fitted decay
/// exponent `l1_exponent.<scheme>` per scheme.
pub fn run_porous_convergence(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    let mode = cfg.preconditioners[0];
    let jobs: Vec<Job> = cfg
        .schemes
        .iter()
        .flat_map(|&scheme| cfg.n.iter().map(move |&n| Job { n, scheme, mode }))
        .collect();
    let m = cfg
        .porous
        .diffusivity
        .barenblatt_exponent()
        .unwrap_or(f64::NAN);
    let (done, err) = run_jobs(cfg, &jobs, |job| {
        let (model, state, records) = porous_run(cfg, job, true)?;
        let errors = porous::error_vs_exact(&state, m, &model)?;
        Ok((errors, records))
    });
    let mut out = empty_output(cfg);
    let mut table = Table::new("convergence", &["n", "scheme", "l1_error", "linf_error"]);
    for (job, ((l1, linf), records)) in done {
        table.push(vec![
            job.n.into(),
            job.scheme.label().into(),
            l1.into(),
            linf.into(),
        ]);
        out.runs.push(run_output(&job, records));
    }
    for &scheme in &cfg.schemes {
        let pts: Vec<(usize, f64)> = table
            .rows
            .iter()
            .filter(|r| r[1] == Value::from(scheme.label()))
            .filter_map(|r| match (&r[0], &r[2]) {
                (Value::Int(n), Value::Float(e)) => Some((*n as usize, *e)),
                _ => None,
            })
            .collect();
        if let Some(slope) = log_log_slope(&pts) {
            out.fits.push(Fit {
                name: format!("l1_exponent.{}", scheme.label()),
                value: -slope,
            });
        }
    }
    out.tables.push(table);
    finish(out, err)
}

/// Iteration statistics per `(n, preconditioner)` and the growth exponent
/// `gmres_growth.<mode>` of the average GMRES count per mode.
pub fn run_iteration_study(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    let scheme = cfg.schemes[0];
    let jobs: Vec<Job> = cfg
        .preconditioners
        .iter()
        .flat_map(|&mode| cfg.n.iter().map(move |&n| Job { n, scheme, mode }))
        .collect();
    let porous = cfg.study.is_porous();
    let (done, err) = run_jobs(cfg, &jobs, |job| {
        if porous {
            porous_run(cfg, job, false).map(|r| r.2)
        } else {
            sulfation_run(cfg, job, false).map(|(_, r)| r.records)
        }
    });
    let mut out = empty_output(cfg);
    let mut table = Table::new(
        "iterations",
        &[
            "n",
            "preconditioner",
            "gmres_min",
            "gmres_avg",
            "gmres_max",
            "newton_avg",
            "inner_cycles_avg",
        ],
    );
    for (job, records) in done {
        let run = run_output(&job, records);
        let s = run.summary;
        table.push(vec![
            job.n.into(),
            job.mode.label().into(),
            s.gmres_min.into(),
            s.gmres_avg.into(),
            s.gmres_max.into(),
            s.newton_avg.into(),
            s.inner_cycles_avg.into(),
        ]);
        out.runs.push(run);
    }
    for &mode in &cfg.preconditioners {
        let pts: Vec<(usize, f64)> = out
            .runs
            .iter()
            .filter(|r| r.preconditioner == mode)
            .map(|r| (r.n, r.summary.gmres_avg))
            .collect();
        if let Some(slope) = log_log_slope(&pts) {
            out.fits.push(Fit {
                name: format!("gmres_growth.{}", mode.label()),
                value: slope,
            });
        }
    }
    out.tables.push(table);
    finish(out, err)
}

/// One table `snapshot_<k>` per requested time with columns
/// `(x_node, s, x_cell, c)`, plus an index table `snapshots` of `(k, t)`.
pub fn run_sulfation_profile(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    let job = Job {
        n: cfg.n[0],
        scheme: cfg.schemes[0],
        mode: cfg.preconditioners[0],
    };
    let mut out = empty_output(cfg);
    let (model, run) = match sulfation_run(cfg, &job, false) {
        Ok(r) => r,
        Err(e) => return finish(out, Some(e)),
    };
    let nodes = model.grid.node_points();
    let cells = model.grid.cell_points();
    let mut index = Table::new("snapshots", &["k", "t"]);
    for (k, snap) in run.snapshots.iter().enumerate() {
        index.push(vec![k.into(), snap.t.into()]);
        let mut t = Table::new(format!("snapshot_{k}"), &["x_node", "s", "x_cell", "c"]);
        for j in 0..model.field_len() {
            t.push(vec![
                nodes[j][0].into(),
                snap.s[j].into(),
                cells[j][0].into(),
                snap.c[j].into(),
            ]);
        }
        out.tables.push(t);
    }
    out.tables.insert(0, index);
    out.runs.push(run_output(&job, run.records));
    Ok(out)
}

/// Front series `(n, t, x_front)` for every grid size and the trailing-window
/// slope `front_slope.n<N>` of each.
pub fn run_front_tracking(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    let jobs: Vec<Job> = cfg
        .n
        .iter()
        .map(|&n| Job {
            n,
            scheme: cfg.schemes[0],
            mode: cfg.preconditioners[0],
        })
        .collect();
    let window = cfg.sulfation.window;
    let (done, mut err) = run_jobs(cfg, &jobs, |job| {
        let (_, run) = sulfation_run(cfg, job, true)?;
        let series: Vec<(f64, f64)> = run
            .records
            .iter()
            .filter_map(|r| r.front.map(|x| (r.t, x)))
            .collect();
        if series.is_empty() {
            return Err(SolverError::NoFront);
        }
        Ok((series, run.records))
    });
    let mut out = empty_output(cfg);
    let mut table = Table::new("front", &["n", "t", "x_front"]);
    for (job, (series, records)) in done {
        for &(t, x) in &series {
            table.push(vec![job.n.into(), t.into(), x.into()]);
        }
        match fit_front_slope(&series, window) {
            Ok(slope) => out.fits.push(Fit {
                name: format!("front_slope.n{}", job.n),
                value: slope,
            }),
            Err(e) => {
                err.get_or_insert(e);
            }
        }
        out.runs.push(run_output(&job, records));
    }
    out.tables.push(table);
    finish(out, err)
}

/// Final `c` on the cells and `s` on the nodes, plus per-mode iteration
/// summaries; per-step statistics are in the run records.
pub fn run_sulfation_2d(cfg: &ExperimentConfig) -> Result<StudyOutput, HarnessError> {
    let n = cfg.n[0];
    let jobs: Vec<Job> = cfg
        .preconditioners
        .iter()
        .map(|&mode| Job {
            n,
            scheme: cfg.schemes[0],
            mode,
        })
        .collect();
    let (done, err) = run_jobs(cfg, &jobs, |job| sulfation_run(cfg, job, false));
    let mut out = empty_output(cfg);
    let mut summary = Table::new(
        "iterations",
        &[
            "preconditioner",
            "gmres_min",
            "gmres_avg",
            "gmres_max",
            "max_step_spread",
            "newton_avg",
        ],
    );
    for (i, (job, (model, run))) in done.into_iter().enumerate() {
        if i == 0 {
            let mut cells = Table::new("cells", &["x", "y", "c"]);
            for (p, &c) in model.grid.cell_points().iter().zip(&run.final_state.c) {
                cells.push(vec![p[0].into(), p[1].into(), c.into()]);
            }
            let mut nodes = Table::new("nodes", &["x", "y", "s"]);
            for (p, &s) in model.grid.node_points().iter().zip(&run.final_state.s) {
                nodes.push(vec![p[0].into(), p[1].into(), s.into()]);
            }
            out.tables.push(cells);
            out.tables.push(nodes);
        }
        let r = run_output(&job, run.records);
        let spread = r
            .records
            .iter()
            .map(|x| x.gmres_max - x.gmres_min)
            .max()
            .unwrap_or(0);
        summary.push(vec![
            job.mode.label().into(),
            r.summary.gmres_min.into(),
            r.summary.gmres_avg.into(),
            r.summary.gmres_max.into(),
            spread.into(),
            r.summary.newton_avg.into(),
        ]);
        out.runs.push(r);
    }
    out.tables.push(summary);
    finish(out, err)
}
