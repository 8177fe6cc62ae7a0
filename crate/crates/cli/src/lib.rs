//! Command-line front end for `elstat-core`: argument language, JSON/CSV/TOML IO, the
//! sampler driver and the built-in check suite.

use std::fmt;

pub mod commands;
pub mod config;
pub mod output;
pub mod sample;
pub mod spec;
pub mod suite;

pub use commands::{run_command, CommandResult};

/// Everything that can stop a command.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or out-of-range arguments.
    Argument(String),
    /// Unknown geometry or map name.
    UnsupportedGeometry(String),
    /// Failure reported by the numerical core.
    Numeric(elstat_core::Error),
    Io(String),
}

impl CliError {
    pub fn arg(msg: impl Into<String>) -> Self {
        CliError::Argument(msg.into())
    }

    /// 3 for numerical-budget failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(e) if e.is_budget() => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Argument(_) => "argument",
            CliError::UnsupportedGeometry(_) => "unsupported geometry",
            CliError::Numeric(e) if e.is_budget() => "budget",
            CliError::Numeric(_) => "numeric",
            CliError::Io(_) => "io",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Argument(m) => write!(f, "{m}"),
            CliError::UnsupportedGeometry(name) => write!(f, "unsupported geometry: {name}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<elstat_core::Error> for CliError {
    fn from(e: elstat_core::Error) -> Self {
        match e {
            elstat_core::Error::UnsupportedGeometry(m) => CliError::UnsupportedGeometry(m.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
