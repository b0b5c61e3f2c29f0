use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::linalg::GmresConfig;
use crate::newton::NewtonConfig;
use crate::parallel::Execution;
use crate::porous::{
    DiffusivitySpec, Dimension, BARENBLATT_DOMAIN, BARENBLATT_ELAPSED, BARENBLATT_T0,
};
use crate::solver::{PreconditionerMode, Scheme, SolverConfig};
use crate::sulfation::SulfationParams;

/// Smallest admissible grid size.
pub const MIN_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    PorousConvergence,
    PorousIterations,
    SulfationProfile,
    SulfationFront,
    SulfationIterations,
    #[serde(rename = "sulfation-2d")]
    Sulfation2d,
}

impl StudyKind {
    pub const ALL: [StudyKind; 6] = [
        StudyKind::PorousConvergence,
        StudyKind::PorousIterations,
        StudyKind::SulfationProfile,
        StudyKind::SulfationFront,
        StudyKind::SulfationIterations,
        StudyKind::Sulfation2d,
    ];

    pub fn label(self) -> &'static str {
        match self {
            StudyKind::PorousConvergence => "porous-convergence",
            StudyKind::PorousIterations => "porous-iterations",
            StudyKind::SulfationProfile => "sulfation-profile",
            StudyKind::SulfationFront => "sulfation-front",
            StudyKind::SulfationIterations => "sulfation-iterations",
            StudyKind::Sulfation2d => "sulfation-2d",
        }
    }

    pub fn is_porous(self) -> bool {
        matches!(
            self,
            StudyKind::PorousConvergence | StudyKind::PorousIterations
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PorousSection {
    pub dimension: Dimension,
    /// Per-axis bounds of the square domain.
    pub domain: [f64; 2],
    /// Start time of the Barenblatt initial profile.
    pub t0: f64,
    pub elapsed: f64,
    /// Timestep ratio: `dt = elapsed / ceil(elapsed / (lambda h))`.
    pub lambda: f64,
    pub diffusivity: DiffusivitySpec,
}

impl Default for PorousSection {
    fn default() -> Self {
        Self {
            dimension: Dimension::One,
            domain: [BARENBLATT_DOMAIN.0, BARENBLATT_DOMAIN.1],
            t0: BARENBLATT_T0,
            elapsed: BARENBLATT_ELAPSED,
            lambda: 1.0,
            diffusivity: DiffusivitySpec::PorousMedium { m: 4.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SulfationSection {
    pub dimension: Dimension,
    /// Depth of the sample (side of the square in 2D).
    pub length: f64,
    pub elapsed: f64,
    /// Requested `dt / h`; the step is shortened to divide `elapsed` evenly.
    pub dt_over_h: f64,
    pub snapshot_times: Vec<f64>,
    /// Trailing fraction of the front series used for the slope fit.
    pub window: f64,
    pub params: SulfationParams,
}

impl Default for SulfationSection {
    fn default() -> Self {
        Self {
            dimension: Dimension::One,
            length: 1.0,
            elapsed: 1.0,
            dt_over_h: 1.0,
            snapshot_times: Vec::new(),
            window: 0.5,
            params: SulfationParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InnerSection {
    /// Relative tolerance of the inner multigrid solve in `mgm-to-convergence` mode.
    pub rtol: f64,
    pub max_cycles: usize,
}

impl Default for InnerSection {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self {
            rtol: s.inner_rtol,
            max_cycles: s.inner_max_cycles,
        }
    }
}

/// A fully populated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub study: StudyKind,
    /// Grid sizes: interior points per axis (porous) or cells per axis (sulfation).
    pub n: Vec<usize>,
    pub schemes: Vec<Scheme>,
    pub preconditioners: Vec<PreconditionerMode>,
    pub execution: Execution,
    /// Recorded with the results; every study is deterministic.
    pub seed: u64,
    pub output: PathBuf,
    pub porous: PorousSection,
    pub sulfation: SulfationSection,
    pub newton: NewtonConfig,
    pub gmres: GmresConfig,
    pub inner: InnerSection,
}

impl ExperimentConfig {
    /// Defaults for `study`; a configuration file only needs to name the study.
    pub fn defaults(study: StudyKind) -> Self {
        let mut cfg = Self {
            study,
            n: vec![32, 64, 128, 256, 512],
            schemes: vec![Scheme::CrankNicolson],
            preconditioners: vec![PreconditionerMode::OneVCycle],
            execution: Execution::default(),
            seed: 0,
            output: PathBuf::from("out"),
            porous: PorousSection::default(),
            sulfation: SulfationSection::default(),
            newton: NewtonConfig::default(),
            gmres: GmresConfig::default(),
            inner: InnerSection::default(),
        };
        if study.is_porous() {
            // plain Newton relies on dt <= C h
            cfg.newton.timestep_guard = Some(1.0);
        }
        let s = &mut cfg.sulfation;
        match study {
            StudyKind::PorousConvergence => {
                cfg.schemes = vec![Scheme::CrankNicolson, Scheme::ImplicitEuler];
            }
            StudyKind::PorousIterations => {
                cfg.preconditioners = vec![PreconditionerMode::None, PreconditionerMode::OneVCycle];
            }
            StudyKind::SulfationIterations => {
                cfg.n = vec![64, 128, 256];
                cfg.preconditioners = vec![
                    PreconditionerMode::OneVCycle,
                    PreconditionerMode::MgmToConvergence,
                ];
            }
            StudyKind::SulfationProfile => {
                cfg.n = vec![128];
                s.params.a = 1e4;
                s.elapsed = 0.25;
                s.snapshot_times = vec![0.05, 0.1, 0.15, 0.2, 0.25];
            }
            StudyKind::SulfationFront => {
                cfg.n = vec![128];
                s.params.a = 1e4;
                s.elapsed = 0.25;
            }
            StudyKind::Sulfation2d => {
                cfg.n = vec![32];
                cfg.preconditioners = vec![PreconditionerMode::OneVCycle, PreconditionerMode::None];
                s.dimension = Dimension::Two;
                s.params.a = 10.0;
            }
        }
        cfg
    }

    /// Solver settings for one run with preconditioner `mode`.
    pub fn solver(&self, mode: PreconditionerMode) -> SolverConfig {
        SolverConfig {
            newton: self.newton,
            linear: self.gmres,
            preconditioner: mode,
            inner_rtol: self.inner.rtol,
            inner_max_cycles: self.inner.max_cycles,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |key: &str, message: String| {
            Err(HarnessError::Invalid {
                key: key.into(),
                message,
            })
        };
        if self.n.is_empty() {
            return bad("n", "at least one grid size is required".into());
        }
        if let Some(&n) = self.n.iter().find(|&&n| n < MIN_N) {
            return bad("n", format!("grid sizes must be at least {MIN_N}, got {n}"));
        }
        if self.schemes.is_empty() {
            return bad("schemes", "at least one scheme is required".into());
        }
        if self.preconditioners.is_empty() {
            return bad(
                "preconditioners",
                "at least one preconditioner mode is required".into(),
            );
        }
        if let Err(e) = self.newton.validate() {
            return bad("newton", e.to_string());
        }
        if !(self.gmres.rtol > 0.0) || self.gmres.max_iter == 0 {
            return bad("gmres", "need rtol > 0 and max_iter >= 1".into());
        }
        if !(self.inner.rtol > 0.0) || self.inner.max_cycles == 0 {
            return bad("inner", "need rtol > 0 and max_cycles >= 1".into());
        }
        if self.study.is_porous() {
            let p = &self.porous;
            if !(p.domain[0] < p.domain[1]) {
                return bad(
                    "porous.domain",
                    format!("need lower < upper, got {:?}", p.domain),
                );
            }
            if !(p.t0 > 0.0) {
                return bad("porous.t0", format!("must be positive, got {}", p.t0));
            }
            if !(p.elapsed > 0.0) {
                return bad(
                    "porous.elapsed",
                    format!("must be positive, got {}", p.elapsed),
                );
            }
            if !(p.lambda > 0.0) {
                return bad(
                    "porous.lambda",
                    format!("must be positive, got {}", p.lambda),
                );
            }
            if p.diffusivity.barenblatt_exponent().is_none() {
                return bad(
                    "porous.diffusivity",
                    "studies start from a Barenblatt profile and need kind = \"porous-medium\" with m > 1".into(),
                );
            }
        } else {
            let s = &self.sulfation;
            if let Err(e) = s.params.validate() {
                return bad("sulfation.params", e.to_string());
            }
            if !(s.length > 0.0) {
                return bad(
                    "sulfation.length",
                    format!("must be positive, got {}", s.length),
                );
            }
            if !(s.elapsed > 0.0) {
                return bad(
                    "sulfation.elapsed",
                    format!("must be positive, got {}", s.elapsed),
                );
            }
            if !(s.dt_over_h > 0.0) {
                return bad(
                    "sulfation.dt_over_h",
                    format!("must be positive, got {}", s.dt_over_h),
                );
            }
            if !(s.window > 0.0 && s.window <= 1.0) {
                return bad(
                    "sulfation.window",
                    format!("must lie in (0, 1], got {}", s.window),
                );
            }
            if let Some(t) = s
                .snapshot_times
                .iter()
                .find(|&&t| !(0.0..=s.elapsed).contains(&t))
            {
                return bad(
                    "sulfation.snapshot_times",
                    format!("{t} lies outside [0, {}]", s.elapsed),
                );
            }
            let want = match self.study {
                StudyKind::SulfationProfile | StudyKind::SulfationFront => Some(Dimension::One),
                StudyKind::Sulfation2d => Some(Dimension::Two),
                _ => None,
            };
            if let Some(d) = want {
                if s.dimension != d {
                    return bad(
                        "sulfation.dimension",
                        format!("study {} needs dimension {}", self.study.label(), d.count()),
                    );
                }
            }
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Invalid {
            key: "porous.diffusivity".into(),
            message: e.to_string(),
        })
    }
}

/// Tables replaced as a whole instead of merged key by key.
const ATOMIC_TABLES: [&str; 1] = ["diffusivity"];

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o))
                if !ATOMIC_TABLES.contains(&k.as_str()) =>
            {
                merge(b, o)
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Parses configuration text. `origin` names the source in error messages.
///
/// Missing keys take the defaults of the named study; unknown keys are errors.
pub fn parse_config(text: &str, origin: &str) -> Result<ExperimentConfig, HarnessError> {
    parse_config_or(text, origin, None)
}

/// As [`parse_config`], taking `fallback` as the study when the text names none.
pub fn parse_config_or(
    text: &str,
    origin: &str,
    fallback: Option<StudyKind>,
) -> Result<ExperimentConfig, HarnessError> {
    let parse_err = |message: String| HarnessError::Parse {
        origin: origin.into(),
        message,
    };
    let raw: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
    let mut raw = raw;
    if let (None, Some(study)) = (raw.get("study"), fallback) {
        raw.insert("study".into(), study.label().into());
    }
    let study: StudyKind = raw
        .get("study")
        .ok_or_else(|| HarnessError::Invalid {
            key: "study".into(),
            message: "missing; expected one of porous-convergence, porous-iterations, sulfation-profile, \
                      sulfation-front, sulfation-iterations, sulfation-2d"
                .into(),
        })?
        .clone()
        .try_into()
        .map_err(|e: toml::de::Error| HarnessError::Invalid {
            key: "study".into(),
            message: e.to_string(),
        })?;
    let mut merged = toml::Table::try_from(ExperimentConfig::defaults(study))
        .expect("default configuration serialises");
    merge(&mut merged, raw);
    let cfg: ExperimentConfig = toml::Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| parse_err(e.to_string().trim_end().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    load_config_or(path, None)
}

/// As [`load_config`], taking `fallback` as the study when the file names none.
pub fn load_config_or(
    path: &Path,
    fallback: Option<StudyKind>,
) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_or(&text, &path.display().to_string(), fallback)
}
