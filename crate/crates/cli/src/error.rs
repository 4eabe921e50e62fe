use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{source_name}: {message}")]
    Validation { source_name: String, message: String },

    #[error("{0}")]
    Numeric(chaindist::Error),

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Usage(_) => 4,
        }
    }
}

/// Numeric failures exit 3; bad inputs and violated preconditions exit 2.
impl From<chaindist::Error> for CliError {
    fn from(e: chaindist::Error) -> Self {
        use chaindist::Error as E;
        match e {
            E::NotConverged { .. }
            | E::UnsupportedSpectrum(_)
            | E::NotDiagonalisable(_)
            | E::SingularSystem
            | E::DegenerateSpectrum { .. }
            | E::CapExceeded { .. }
            | E::EnumerationTooLarge { .. } => CliError::Numeric(e),
            other => CliError::Validation {
                source_name: "input".into(),
                message: other.to_string(),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
