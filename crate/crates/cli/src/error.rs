use curkit::{CurError, ErrorKind};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CurError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("could not encode report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Core(e) => match e.kind() {
                ErrorKind::Config => "config",
                ErrorKind::Data => "data",
                ErrorKind::Numerical => "numerical",
            },
            CliError::Io { .. } => "data",
            CliError::Json(_) => "numerical",
        }
    }

    /// 2 configuration, 3 data, 4 numerical.
    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "config" => 2,
            "data" => 3,
            _ => 4,
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    exit_code: u8,
    message: String,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    schema_version: u32,
    error: ErrorBody<'a>,
}

/// Machine-readable error line for stderr.
pub fn error_json(kind: &str, exit_code: u8, message: String) -> String {
    let report = ErrorReport {
        schema_version: crate::report::SCHEMA_VERSION,
        error: ErrorBody {
            kind,
            exit_code,
            message,
        },
    };
    serde_json::to_string(&report).unwrap_or_else(|_| format!("{{\"error\":{{\"kind\":\"{kind}\"}}}}"))
}
