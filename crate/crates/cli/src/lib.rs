//! Command-line front end for `morlim`: model I/O, run configuration,
//! reductions with certificates, and comparison runs.
//!
//! Every command returns an [`ExitStatus`] or a [`CliError`]; both map to the
//! process exit codes listed on [`ExitStatus`].

use std::path::{Path, PathBuf};

use morlim::verify::Verdict;
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod io;
pub mod run;

pub use commands::{cmd_compare, cmd_reduce, cmd_synth, cmd_verify, CompareRow};
pub use config::{BandSpec, InterpolationSpec, ModeWindow, RunConfig};

/// Process exit codes: 0 ok, 1 certificate failure, 2 usage or I/O,
/// 3 numerical failure, 4 inconclusive certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok,
    CertificateFailure,
    Usage,
    Numerical,
    Inconclusive,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        match self {
            ExitStatus::Ok => 0,
            ExitStatus::CertificateFailure => 1,
            ExitStatus::Usage => 2,
            ExitStatus::Numerical => 3,
            ExitStatus::Inconclusive => 4,
        }
    }

    pub fn from_verdict(v: Verdict) -> Self {
        match v {
            Verdict::Pass => ExitStatus::Ok,
            Verdict::Fail => ExitStatus::CertificateFailure,
            Verdict::Inconclusive => ExitStatus::Inconclusive,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message}")]
    Usage { message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{name}: {source}", name = .source.name())]
    Numerical {
        #[from]
        source: morlim::Error,
    },
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage {
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Numerical { .. } => ExitStatus::Numerical,
            _ => ExitStatus::Usage,
        }
    }
}
