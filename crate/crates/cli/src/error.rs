use serde_json::{json, Value};

/// Failure category; each maps to one process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
    NotIdentifiable,
    Oracle,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Parse => 2,
            ErrorKind::Validation => 3,
            ErrorKind::NotIdentifiable => 4,
            ErrorKind::Oracle => 5,
        }
    }

    fn label(self) -> &'static str {
        match self {
            ErrorKind::Parse => "parse",
            ErrorKind::Validation => "validation",
            ErrorKind::NotIdentifiable => "not_identifiable",
            ErrorKind::Oracle => "oracle",
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    /// Extra fields merged into the error object.
    pub details: Option<Value>,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
            details: None,
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Parse, message)
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Validation, message)
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    /// `{"error": kind, "message": ..., ...details}`
    pub fn to_json(&self) -> Value {
        let mut obj = json!({ "error": self.kind.label(), "message": self.message });
        if let Some(Value::Object(extra)) = &self.details {
            for (k, v) in extra {
                obj[k] = v.clone();
            }
        }
        obj
    }

    /// Errors raised while loading inputs: malformed files are parse
    /// errors, anything else is a validation error.
    pub fn from_load(err: doshap_core::Error) -> Self {
        match err {
            doshap_core::Error::Parse(m) => Self::parse(m),
            other => Self::validation(other.to_string()),
        }
    }
}

impl From<doshap_core::Error> for CliError {
    fn from(err: doshap_core::Error) -> Self {
        let kind = if err.is_oracle_error() {
            ErrorKind::Oracle
        } else if matches!(err, doshap_core::Error::Parse(_)) {
            ErrorKind::Parse
        } else {
            ErrorKind::Validation
        };
        CliError::new(kind, err.to_string())
    }
}
