use qme_core::QmeError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(#[from] QmeError),
    #[error("check mismatch: {0}")]
    Mismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Config { .. } | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}
