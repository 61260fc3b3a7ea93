use std::fmt;

use decoyvis_core::Error;

/// Failure classes and their process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Extraction,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::Extraction => 3,
            ErrorKind::Io => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Extraction => "extraction",
            ErrorKind::Io => "io",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Validation, message: msg.into() }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Io, message: msg.into() }
    }

    /// `error kind=<kind> exit=<code> message=<JSON string>`, one line.
    pub fn stderr_line(&self) -> String {
        let msg = serde_json::to_string(&self.message).expect("string serializes");
        format!("error kind={} exit={} message={msg}", self.kind.name(), self.kind.exit_code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.name(), self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Extraction(_) => ErrorKind::Extraction,
            Error::Io(_) | Error::Png(_) => ErrorKind::Io,
            Error::InvalidSpec(_) | Error::InvalidParameter(_) | Error::DimensionMismatch { .. } | Error::Manifest(_) => ErrorKind::Validation,
        };
        CliError { kind, message: e.to_string() }
    }
}
