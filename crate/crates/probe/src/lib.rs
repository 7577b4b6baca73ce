//! Command-line front end for `fockshift-core`: configuration files, the
//! verification suite, coefficient tables, energy sweeps and the demo run.
//!
//! Every command writes CSV into an output directory and maps its outcome to
//! an exit code through [`Outcome`] and [`ProbeError::exit_code`].

pub mod coefficients;
pub mod config;
pub mod demo;
pub mod output;
pub mod sweep;
pub mod verify;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub use config::{load_config, parse_config};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] fockshift_core::Error),
}

impl ProbeError {
    pub fn exit_code(&self) -> u8 {
        use fockshift_core::Error as E;
        match self {
            ProbeError::Usage(_) | ProbeError::Io { .. } | ProbeError::Csv(_) => EXIT_USAGE,
            ProbeError::Core(
                E::Config(_)
                | E::Leakage { .. }
                | E::UnknownLadder(_)
                | E::Layout(_)
                | E::DimensionCap { .. }
                | E::GridTooCoarse { .. },
            ) => EXIT_USAGE,
            ProbeError::Core(_) => EXIT_FAIL,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        ProbeError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, ProbeError>;

/// Pass/fail verdict of a completed command.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => EXIT_PASS,
            Outcome::Fail => EXIT_FAIL,
        }
    }

    pub fn and(self, other: Outcome) -> Outcome {
        Outcome::from_pass(self == Outcome::Pass && other == Outcome::Pass)
    }
}
