use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad config, bad input objects or I/O trouble.
    Validation,
    Optimizer,
}

/// A failure tied to the config field that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    /// Field path such as `state.matrix`, or `config` for the file itself.
    pub path: String,
    pub message: String,
}

impl CliError {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Validation,
            path: path.into(),
            message: message.into(),
        }
    }

    /// Wraps a library error; optimizer failures keep their own kind.
    pub fn lib(path: impl Into<String>, err: qkelly::Error) -> Self {
        let kind = match err {
            qkelly::Error::OptimizerFailed(_) => ErrorKind::Optimizer,
            _ => ErrorKind::Validation,
        };
        Self {
            kind,
            path: path.into(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => 2,
            ErrorKind::Optimizer => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
