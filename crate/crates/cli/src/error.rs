//! CLI error type and the machine-readable error JSON contract.

use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

/// Exit code 1: data or computation error, reported as JSON on stderr.
/// Exit code 2: flag misuse, reported as plain usage text on stderr.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Ingest(#[from] xcorr_core::ingest::IngestError),
    #[error(transparent)]
    Transform(#[from] xcorr_core::transform::TransformError),
    #[error(transparent)]
    Spectrum(#[from] xcorr_core::spectrum::SpectrumError),
    #[error(transparent)]
    Sectors(#[from] xcorr_core::sectors::SectorsError),
    #[error(transparent)]
    Simulator(#[from] xcorr_core::simulator::SimError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config {path}: {detail}")]
    Config { path: PathBuf, detail: String },
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Ingest(_) => "ingest",
            CliError::Transform(_) => "transform",
            CliError::Spectrum(_) => "spectrum",
            CliError::Sectors(_) => "sectors",
            CliError::Simulator(_) => "simulator",
            CliError::Io { .. } => "io",
            CliError::Config { .. } => "config",
            CliError::Data(_) => "data",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// `{"error":{"kind":...,"message":...}}`
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body { kind: self.kind(), message: self.to_string() },
        })
        .expect("error serialization cannot fail")
    }
}
