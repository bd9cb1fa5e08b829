//! Command-line front-end for `blaschke-core`: flag and config parsing, the
//! condition pipelines, JSON/CSV reports and thread-parallel grid sampling.

pub mod cli;
pub mod commands;
pub mod format;
pub mod parse;
pub mod sampling;

use blaschke_core::conditions::ConditionError;
use blaschke_core::domain::DomainError;
use blaschke_core::potential::PotentialError;
use blaschke_core::zeros::ZeroError;
use blaschke_core::{EvalError, ParseError};
use thiserror::Error;

/// Every failure of a command; all of them exit with status 3.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Zero(#[from] ZeroError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
}

impl LabError {
    /// Machine-readable category for the error object.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Usage(_) => "usage",
            LabError::Input(_) => "input",
            LabError::Io { .. } => "io",
            LabError::Write(_) | LabError::Csv(_) => "output",
            LabError::Parse(_) => "parse",
            LabError::Eval(_) => "evaluation",
            LabError::Domain(_) => "domain",
            LabError::Potential(_) => "potential",
            LabError::Zero(_) => "zeros",
            LabError::Condition(_) => "condition",
        }
    }
}
