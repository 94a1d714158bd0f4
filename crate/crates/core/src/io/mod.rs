//! Config parsing, CSV serialization and run orchestration.

pub mod audit;
pub mod config;
pub mod driver;
pub mod plot;
pub mod series;
pub mod snapshot;

use std::path::PathBuf;

use thiserror::Error;

use crate::error::SimError;
use crate::integrator::RunError;

pub use audit::{audit_records, AuditCheck, AuditReport, CheckStatus};
pub use config::{parse_config, Cadence, ConfigError, InitialKind, RunConfig};
pub use driver::{run_simulation, RunSummary};
pub use series::{read_diagnostics, write_convergence, write_diagnostics};
pub use snapshot::{read_snapshot, write_snapshot};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}, line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Sim(#[from] SimError),

    #[error("{error}; last accepted state written to {dump}")]
    Aborted { error: Box<RunError>, dump: PathBuf },
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        IoError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
