use thiserror::Error;

use segal_dyn::braket::BraketError;
use segal_dyn::cwdist::CwError;
use segal_dyn::gencat::GenError;
use segal_dyn::strings::StringError;
use segal_dyn::tangent::TangentError;
use segal_dyn::tower::TowerError;
use segal_dyn::FinCatError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{section}: unknown identifier `{id}`")]
    Dangling { section: &'static str, id: String },
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
    #[error("{0}")]
    Input(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("law violation: {0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Capacity(_) => EXIT_CAPACITY,
            CliError::Violation(_) => EXIT_VIOLATION,
            _ => EXIT_INPUT,
        }
    }

    pub fn dangling(section: &'static str, id: impl Into<String>) -> Self {
        CliError::Dangling { section, id: id.into() }
    }
}

impl From<FinCatError> for CliError {
    fn from(e: FinCatError) -> Self {
        match e {
            FinCatError::Capacity { .. } => CliError::Capacity(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::InvalidLevel { .. } | TowerError::SeedNotFunctor { .. } => CliError::Violation(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<TangentError> for CliError {
    fn from(e: TangentError) -> Self {
        match e {
            TangentError::Capacity { .. } => CliError::Capacity(e.to_string()),
            TangentError::InvalidPsi { .. } => CliError::Violation(e.to_string()),
            TangentError::Base(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

macro_rules! input_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        })*
    };
}

input_error!(BraketError, CwError, GenError, StringError);
