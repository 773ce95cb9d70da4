use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const NON_CONVERGENCE: i32 = 2;
    pub const VERIFICATION: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] hardy_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use hardy_core::Error as E;
        match self {
            CliError::Core(
                E::InvalidParams(_)
                | E::InvalidDomain(_)
                | E::InvalidConstantIndex { .. }
                | E::MuOutOfRange { .. }
                | E::DegenerateIndicial { .. }
                | E::Hypothesis { .. }
                | E::InvalidMesh(_)
                | E::TooFewLevels { .. }
                | E::CollarTooThin { .. }
                | E::EmptyAdmissibleSpace(_),
            ) => exit::CONFIG,
            CliError::Core(_) => exit::NON_CONVERGENCE,
            CliError::Config(_) | CliError::Io(_) | CliError::Output(_) => exit::CONFIG,
        }
    }
}
