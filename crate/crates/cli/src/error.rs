use curtainlab_core::curtain::CurtainError;
use curtainlab_core::median::MedianError;
use curtainlab_core::projection::ProjectionError;
use curtainlab_core::raag::RaagError;

/// Failures that stop a command before it has a result. Invariant failures
/// are results, not errors.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error in {file} at line {line}, column {column}: {message}")]
    Parse {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn parse(file: &str, e: &serde_json::Error) -> Self {
        let message = e.to_string();
        // serde appends " at line L column C"; keep only the message
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        CliError::Parse {
            file: file.to_string(),
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

impl From<RaagError> for CliError {
    fn from(e: RaagError) -> Self {
        match e {
            RaagError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<ProjectionError> for CliError {
    fn from(e: ProjectionError) -> Self {
        match e {
            ProjectionError::Raag(r) => r.into(),
            ProjectionError::BudgetExceeded(_) => CliError::Budget(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<MedianError> for CliError {
    fn from(e: MedianError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CurtainError> for CliError {
    fn from(e: CurtainError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
