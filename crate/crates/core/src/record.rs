use serde::{Deserialize, Serialize};

use crate::newton::NewtonReport;

/// Diagnostics for one time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub step: usize,
    pub t: f64,
    pub newton_iterations: usize,
    pub gmres_min: usize,
    pub gmres_avg: f64,
    pub gmres_max: usize,
    /// Mean inner multigrid cycles per GMRES solve (zero without an inner solve).
    pub inner_cycles_avg: f64,
    pub l1_error: Option<f64>,
    pub linf_error: Option<f64>,
    pub front: Option<f64>,
}

impl RunRecord {
    pub fn from_report(step: usize, t: f64, report: &NewtonReport) -> Self {
        let (gmres_min, gmres_avg, gmres_max) = report.gmres_stats();
        let inner_cycles_avg = if report.linear.is_empty() {
            0.0
        } else {
            report.linear.iter().map(|r| r.inner_cycles).sum::<usize>() as f64
                / report.linear.len() as f64
        };
        Self {
            step,
            t,
            newton_iterations: report.iterations,
            gmres_min,
            gmres_avg,
            gmres_max,
            inner_cycles_avg,
            l1_error: None,
            linf_error: None,
            front: None,
        }
    }
}

/// Aggregate over a run: mean Newton iterations per step and the GMRES
/// minimum, mean and maximum over every Newton solve.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunSummary {
    pub steps: usize,
    pub newton_avg: f64,
    pub gmres_min: usize,
    pub gmres_avg: f64,
    pub gmres_max: usize,
    pub inner_cycles_avg: f64,
}

impl RunSummary {
    pub fn from_records(records: &[RunRecord]) -> Self {
        if records.is_empty() {
            return Self::default();
        }
        let steps = records.len();
        let newton_total: usize = records.iter().map(|r| r.newton_iterations).sum();
        // GMRES mean weighted by the number of Newton solves in each step.
        let solves = newton_total.max(1) as f64;
        let gmres_avg = records
            .iter()
            .map(|r| r.gmres_avg * r.newton_iterations as f64)
            .sum::<f64>()
            / solves;
        let inner_cycles_avg = records
            .iter()
            .map(|r| r.inner_cycles_avg * r.newton_iterations as f64)
            .sum::<f64>()
            / solves;
        Self {
            steps,
            newton_avg: newton_total as f64 / steps as f64,
            gmres_min: records.iter().map(|r| r.gmres_min).min().unwrap_or(0),
            gmres_avg,
            gmres_max: records.iter().map(|r| r.gmres_max).max().unwrap_or(0),
            inner_cycles_avg,
        }
    }
}
