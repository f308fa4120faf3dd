// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;
use twolevel::Error as ModelError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const ADMISSIBILITY: i32 = 2;
    pub const VERIFICATION: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Model(#[from] ModelError),

    #[error("verification failed: max |P_closed - P_oracle| = {max_abs_error:e} at tau = {tau} exceeds threshold {threshold:e}")]
    Verification {
        max_abs_error: f64,
        tau: f64,
        threshold: f64,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Model(e) => match e {
                ModelError::InvalidParameter { .. }
                | ModelError::NegativeTime(_)
                | ModelError::InvalidGrid(_)
                | ModelError::FamilyMismatch { .. }
                | ModelError::ToleranceOutOfRange(_) => exit::CONFIG,
                ModelError::NearSingular { .. }
                | ModelError::Inadmissible { .. }
                | ModelError::DegeneratePhase { .. } => exit::ADMISSIBILITY,
                ModelError::StepSizeUnderflow { .. }
                | ModelError::StepLimit { .. }
                | ModelError::NonFinite { .. }
                | ModelError::NoConvergence { .. } => exit::VERIFICATION,
            },
            CliError::Verification { .. } => exit::VERIFICATION,
            CliError::Io { .. } => exit::IO,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
