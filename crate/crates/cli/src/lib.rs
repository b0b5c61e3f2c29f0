//! Command-line front end for the experiment harness.
//!
//! Exit codes: 0 on success, 1 when a solver run fails, 2 for usage and
//! configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use degpar::harness::{
    load_config_or, run_study, write_output, ExperimentConfig, Format, HarnessError, StudyKind,
    StudyOutput,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "degpar",
    version,
    about = "Run Newton-Krylov-multigrid experiments and emit CSV or JSON tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration; missing keys take the defaults of the study, which
    /// defaults to the first study of the subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides `output` in the configuration).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Print only errors.
    #[arg(long, global = true)]
    quiet: bool,

    /// Print the fully populated configuration and exit without running.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Barenblatt error decay against N for each scheme.
    PorousConvergence,
    /// GMRES and Newton counts against N per preconditioner (porous or sulfation).
    Iterations,
    /// Sulfation profiles of s and c at the snapshot times.
    SulfationProfile,
    /// Sulfation front position against time and its log-log slope.
    Front,
    /// Two-dimensional sulfation with iteration statistics per preconditioner.
    #[command(name = "sulfation-2d")]
    Sulfation2d,
}

impl Command {
    /// Studies the subcommand accepts; the first is used without `--config`.
    fn studies(self) -> &'static [StudyKind] {
        match self {
            Command::PorousConvergence => &[StudyKind::PorousConvergence],
            Command::Iterations => &[StudyKind::PorousIterations, StudyKind::SulfationIterations],
            Command::SulfationProfile => &[StudyKind::SulfationProfile],
            Command::Front => &[StudyKind::SulfationFront],
            Command::Sulfation2d => &[StudyKind::Sulfation2d],
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let allowed = cli.command.studies();
    let mut cfg = match &cli.config {
        Some(path) => load_config_or(path, Some(allowed[0])).map_err(|e| match e {
            // An unreadable configuration file is a usage problem.
            HarnessError::Io { path, source } => HarnessError::Invalid {
                key: "--config".into(),
                message: format!("{}: {source}", path.display()),
            },
            e => e,
        })?,
        None => ExperimentConfig::defaults(allowed[0]),
    };
    if !allowed.contains(&cfg.study) {
        let names: Vec<&str> = allowed.iter().map(|s| s.label()).collect();
        return Err(HarnessError::Invalid {
            key: "study".into(),
            message: format!(
                "`{}` cannot be run by this subcommand (expected {})",
                cfg.study.label(),
                names.join(" or ")
            ),
        });
    }
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    Ok(cfg)
}

fn report(out: &StudyOutput, files: &[PathBuf], stdout: &mut dyn Write) {
    for f in files {
        let _ = writeln!(stdout, "wrote {}", f.display());
    }
    for fit in &out.fits {
        let _ = writeln!(stdout, "{} = {:.4}", fit.name, fit.value);
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    cli_main_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

/// As [`cli_main`], writing to the given streams.
pub fn cli_main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let cfg = match resolve_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    if cli.print_config {
        return match cfg.to_toml_string() {
            Ok(text) => {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            }
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_CONFIG
            }
        };
    }
    let format = Format::from(cli.format);
    match run_study(&cfg) {
        Ok(out) => match write_output(&out, &cfg.output, format) {
            Ok(files) => {
                if !cli.quiet {
                    report(&out, &files, stdout);
                }
                EXIT_OK
            }
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                if e.is_config_error() {
                    EXIT_CONFIG
                } else {
                    EXIT_SOLVER
                }
            }
        },
        Err(HarnessError::Study { partial, source }) => {
            let _ = writeln!(stderr, "error: {source}");
            if let Ok(files) = write_output(&partial, &cfg.output, format) {
                let _ = writeln!(
                    stderr,
                    "partial results from {} completed run(s) kept",
                    partial.runs.len()
                );
                if !cli.quiet {
                    report(&partial, &files, stdout);
                }
            }
            EXIT_SOLVER
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_config_error() {
                EXIT_CONFIG
            } else {
                EXIT_SOLVER
            }
        }
    }
}
