use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Compute(#[from] csl_rotor::Error),

    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("check failed: max deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    CheckFailed { deviation: f64, tol: f64 },
}

impl CliError {
    pub fn config(key: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{key}: {reason}"))
    }

    pub fn exit_code(&self) -> u8 {
        use csl_rotor::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(E::InvalidParameter { .. } | E::NotANumber(_) | E::NotAxisymmetric { .. }) => 2,
            CliError::Compute(E::ChannelInsensitive { .. }) => 2,
            CliError::Compute(_) => 3,
            CliError::Io { .. } => 1,
            CliError::CheckFailed { .. } => 4,
        }
    }
}
