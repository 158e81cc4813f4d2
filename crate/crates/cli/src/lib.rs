//! Library half of the `dipolecav` command: option parsing, execution and
//! file emission, kept separate from `main` so tests can drive it directly.

pub mod config;
pub mod oracle;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use dipolecav::analysis::{enhancement_ratio, run_sweep, SweepSpec};
use serde_json::json;

pub use config::{parse_config, Format, RunConfig, Task};

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_POINT_FAILED: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Clap(e) if !e.use_stderr() => EXIT_OK,
            CliError::Clap(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// Rendered artifact and whether every point succeeded.
pub struct Artifact {
    pub bytes: Vec<u8>,
    pub all_ok: bool,
}

fn sweep_artifact(spec: &SweepSpec, format: Format, exponent_only: bool) -> Result<Artifact, CliError> {
    let r = run_sweep(spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let bytes = match (format, exponent_only) {
        (Format::Csv, false) => output::sweep_csv(&r)?,
        (Format::Csv, true) => output::exponent_csv(&r)?,
        (Format::Json, false) => output::sweep_json(&r, "sweep")?,
        (Format::Json, true) => output::sweep_json(&r, "exponent")?,
    };
    Ok(Artifact { bytes, all_ok: r.all_ok() })
}

/// Computes the artifact for a run without writing it.
pub fn render(cfg: &RunConfig) -> Result<Artifact, CliError> {
    match &cfg.task {
        Task::Sweep(spec) => sweep_artifact(spec, cfg.format, false),
        Task::Exponent(spec) => sweep_artifact(spec, cfg.format, true),
        Task::Enhance(spec) => {
            let series = spec
                .components
                .iter()
                .map(|&c| enhancement_ratio(&spec.geometry, spec.p, &spec.placement, &spec.x_grid, c, &spec.ctrl))
                .collect::<dipolecav::Result<Vec<_>>>()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let all_ok = output::combined_status(&series).iter().all(|s| *s == "ok");
            let bytes = match cfg.format {
                Format::Csv => output::enhance_csv(&series)?,
                Format::Json => output::enhance_json(spec, &series)?,
            };
            Ok(Artifact { bytes, all_ok })
        }
        Task::Oracle(spec) => {
            let rows = oracle::run_oracle(spec);
            let all_ok = rows.iter().all(|r| r.status == "ok");
            let bytes = match cfg.format {
                Format::Csv => output::oracle_csv(&rows)?,
                Format::Json => {
                    let geometry = match spec.geometry {
                        config::OracleGeometry::Planar => "planar",
                        config::OracleGeometry::Channel => "channel",
                    };
                    let meta = json!({
                        "command": "oracle",
                        "geometry": geometry,
                        "p": spec.p,
                        "permittivity": spec.permittivity,
                        "seed": spec.seed,
                        "count": spec.count,
                        "ctrl": spec.ctrl,
                        "modes": spec.modes,
                        "tol": spec.tol,
                        "version": env!("CARGO_PKG_VERSION"),
                    });
                    output::oracle_json(&rows, meta)?
                }
            };
            Ok(Artifact { bytes, all_ok })
        }
    }
}

/// Runs a parsed configuration, writing to `cfg.out` or stdout. Returns the exit status.
pub fn execute(cfg: &RunConfig) -> Result<i32, CliError> {
    let art = render(cfg)?;
    match &cfg.out {
        Some(path) => output::write_atomic(path, &art.bytes)?,
        None => std::io::stdout().lock().write_all(&art.bytes).map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(if art.all_ok { EXIT_OK } else { EXIT_POINT_FAILED })
}

/// Applies `DIPOLECAV_THREADS` to the global thread pool, if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("DIPOLECAV_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("DIPOLECAV_THREADS must be a positive integer, got '{v}'")))?;
    // A pool that is already initialised keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Full command: parse, execute, report. Returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = configure_threads().and_then(|_| parse_config(argv)).and_then(|cfg| execute(&cfg));
    match result {
        Ok(code) => {
            if code == EXIT_POINT_FAILED {
                eprintln!("dipolecav: some points failed; see the status column");
            }
            code
        }
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            CliError::Clap(e).exit_code()
        }
        Err(e) => {
            eprintln!("dipolecav: {e}");
            e.exit_code()
        }
    }
}
