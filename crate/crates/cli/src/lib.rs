//! Command-line front end: scenario files in, CSV and SVG artifacts out.

pub mod config;
pub mod scenario;
pub mod svg;
pub mod table;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{Config, ParseError};
pub use scenario::{Artifact, Format, Outcome, Scenario, ScenarioKind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Physics(#[from] qhe_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    VerificationFailed(String),
}

impl CliError {
    /// 1 verification failure, 2 bad input, 3 physics/domain error, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

/// Overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub summary: String,
    pub written: Vec<PathBuf>,
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::parse(&text).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Loads, executes and writes a scenario. A failing verification scenario
/// still writes its artifacts before reporting the failure.
pub fn run(path: &Path, options: &RunOptions) -> Result<RunReport, CliError> {
    let mut scenario = load(path)?;
    if let Some(formats) = &options.formats {
        scenario.formats = formats.clone();
    }
    let dir = options
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&scenario.output_dir));
    let outcome = scenario.execute()?;
    let written = write_artifacts(&dir, &outcome.artifacts)?;
    if !outcome.passed {
        return Err(CliError::VerificationFailed(outcome.summary));
    }
    Ok(RunReport {
        summary: outcome.summary,
        written,
    })
}

/// Runs every verification suite; `Err` if any fails.
pub fn verify(seed: u64) -> Result<Outcome, CliError> {
    let outcome = Scenario::verification(seed).execute()?;
    if outcome.passed {
        Ok(outcome)
    } else {
        Err(CliError::VerificationFailed(outcome.summary))
    }
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let path = dir.join(&a.file_name);
        fs::write(&path, &a.contents).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
