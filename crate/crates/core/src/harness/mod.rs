//! Experiment driver: TOML configuration, studies and CSV/JSON output.
//!
//! A study is a batch of independent integrations. Runs are spread over
//! threads according to [`ExperimentConfig::execution`]; results are always
//! collected in configuration order, so output is deterministic.

mod config;
mod output;
mod studies;

use std::path::PathBuf;

use thiserror::Error;

use crate::error::SolverError;

pub use config::{
    load_config, load_config_or, parse_config, parse_config_or, ExperimentConfig, InnerSection,
    PorousSection, StudyKind, SulfationSection, MIN_N,
};
pub use output::{
    table_to_csv, to_json_string, write_output, Fit, Format, RunOutput, StudyOutput, Table, Value,
    RECORD_COLUMNS,
};
pub use studies::{
    run_front_tracking, run_iteration_study, run_porous_convergence, run_study, run_sulfation_2d,
    run_sulfation_profile,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A run failed; `partial` holds every run that completed.
    #[error("{source}")]
    Study {
        partial: Box<StudyOutput>,
        #[source]
        source: SolverError,
    },
}

impl HarnessError {
    /// True for problems with the configuration rather than the computation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            HarnessError::Parse { .. } | HarnessError::Invalid { .. }
        )
    }
}
