//! Library side of the `qhlat` binary: argument model, configuration,
//! commands and output encoders.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 input error, 3 numerical failure,
//! 4 no exceptional point in the searched range.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::args::{Cli, Convention};
use crate::config::{ConfigFile, Settings};

pub const EXIT_IO: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_NOT_FOUND: u8 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<qhlat_core::Error> for CliError {
    fn from(e: qhlat_core::Error) -> Self {
        use qhlat_core::Error as E;
        let code = match e {
            E::Dimension(_) | E::InvalidInput(_) | E::BasisSize { .. } | E::OutsideDomain(_) => EXIT_INPUT,
            E::NotFoundInRange { .. } => EXIT_NOT_FOUND,
            E::NoConvergence { .. }
            | E::Residual { .. }
            | E::IllSeparated { .. }
            | E::DegenerateSpectrum { .. }
            | E::ComplexSpectrum { .. } => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Everything needed to reproduce a run, plus its results.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub toolkit_version: String,
    /// Taken from `SOURCE_DATE_EPOCH` in the main output so that repeated runs
    /// are byte-identical; wall-clock time only in `--record` files.
    pub timestamp: Option<String>,
    pub convention: Convention,
    pub config: Settings,
    pub payload: serde_json::Value,
}

/// Result of one command in every encoding it supports.
#[derive(Debug, Clone)]
pub struct Report {
    pub payload: serde_json::Value,
    pub text: String,
    pub csv: Option<String>,
    pub ppm: Option<Vec<u8>>,
    /// Printed to stderr; not part of the output bytes.
    pub warnings: Vec<String>,
}

pub struct RunOutput {
    pub bytes: Vec<u8>,
    pub record: RunRecord,
    pub warnings: Vec<String>,
}

pub fn settings_for(cli: &Cli) -> Result<Settings, CliError> {
    let config = match &cli.common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    Settings::resolve(&cli.common, &config)
}

/// Run a parsed command line and encode its main output.
pub fn run(cli: &Cli) -> Result<RunOutput, CliError> {
    let settings = settings_for(cli)?;
    let report = commands::execute(&cli.command, &settings)?;
    let record = RunRecord {
        command: cli.command.name().to_string(),
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: std::env::var("SOURCE_DATE_EPOCH").ok().map(|s| format!("unix:{s}")),
        convention: settings.convention,
        config: settings.clone(),
        payload: report.payload.clone(),
    };
    let bytes = output::encode(&report, &record, settings.format)?;
    Ok(RunOutput {
        bytes,
        record,
        warnings: report.warnings,
    })
}

/// Write `bytes` to `path`, or to stdout when `path` is `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    use std::io::Write;
    match path {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(format!("cannot write stdout: {e}")))
        }
    }
}

pub fn write_record(record: &RunRecord, path: &Path) -> Result<(), CliError> {
    let mut rec = record.clone();
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    rec.timestamp = Some(format!("unix:{secs}"));
    let mut text = serde_json::to_string_pretty(&rec)
        .map_err(|e| CliError::io(format!("cannot encode record: {e}")))?;
    text.push('\n');
    emit(text.as_bytes(), Some(path))
}
