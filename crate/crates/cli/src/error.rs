use std::path::PathBuf;

use thiserror::Error;

/// Where a configuration value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    /// The n-th `--set` override, counting from 1.
    Override(usize),
    Default,
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override(n) => write!(f, "--set #{n}"),
            Origin::Default => write!(f, "default"),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error ({origin}): {message}")]
    Config { origin: Origin, message: String },

    #[error("configuration error: missing required keys: {}", keys.join(", "))]
    MissingKeys { keys: Vec<String> },

    #[error("configuration error: no scenario given (use a subcommand or set run.scenario)")]
    MissingScenario,

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{scenario}: {source}")]
    Scenario { scenario: &'static str, source: bulb_core::Error },
}

impl CliError {
    pub(crate) fn config(origin: Origin, message: impl Into<String>) -> Self {
        CliError::Config { origin, message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
