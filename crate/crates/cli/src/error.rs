use std::path::PathBuf;

/// Everything that can stop a command, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: field `{field}`: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("{field}: {source}")]
    Validation {
        field: String,
        #[source]
        source: rndunit::Error,
    },
    #[error("{0}")]
    Config(String),
    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: rndunit::Error,
    },
    #[error("exact channel and embedded evolution disagree: trace distance {distance:e} at t = {time} exceeds {allowed:e}")]
    EquivalenceBreach { distance: f64, time: f64, allowed: f64 },
}

impl CliError {
    pub fn validation(field: impl Into<String>, source: rndunit::Error) -> Self {
        CliError::Validation {
            field: field.into(),
            source,
        }
    }

    /// Wraps a library error raised while running, routing numerical
    /// failures to exit code 3 and precondition failures to 2.
    pub fn from_run(context: impl Into<String>, source: rndunit::Error) -> Self {
        let context = context.into();
        if source.is_numerical() {
            CliError::Numerical { context, source }
        } else {
            CliError::Validation { field: context, source }
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Config(_) => 2,
            CliError::Numerical { .. } | CliError::EquivalenceBreach { .. } => 3,
        }
    }
}
