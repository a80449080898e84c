use thiserror::Error;

/// Failure classes of the runner; each maps to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    /// Classifies a core error raised while training or evaluating.
    pub fn from_core(context: &str, e: npssl::error::Error) -> Self {
        use npssl::error::Error as E;
        let msg = format!("{context}: {e}");
        match e {
            E::NonFinite(_) | E::NotSpd(_) | E::NotNormalized(_) | E::Detached | E::NonScalarLoss { .. } => {
                CliError::Numerical(msg)
            }
            E::InvalidArgument(_) | E::Shape { .. } => CliError::Config(msg),
            E::Empty(_) | E::Infeasible(_) | E::Io(_) | E::Format(_) => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("io: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
