use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0}")]
    Instability(String),
    #[error("{0}")]
    Singular(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Instability(_) => 4,
            CliError::Singular(_) => 5,
            CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::NonConvergence(_) => "non_convergence",
            CliError::Instability(_) => "instability",
            CliError::Singular(_) => "singular",
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON record for stderr.
    pub fn machine_line(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

impl From<optomech::Error> for CliError {
    fn from(e: optomech::Error) -> Self {
        use optomech::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidParameter { .. } | E::RegimeViolation(_) | E::UnsupportedPhase(_) | E::InvalidGrid(_) => {
                CliError::Validation(msg)
            }
            E::NonConvergence { .. } => CliError::NonConvergence(msg),
            E::Unstable { .. } | E::EigSolverFailure => CliError::Instability(msg),
            E::SingularAtFrequency { .. } => CliError::Singular(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
