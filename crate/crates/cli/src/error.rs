use std::fmt;

use ves_core::VesError;

/// Process exit codes.
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_MODEL: u8 = 3;
pub const EXIT_PROPERTY: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad config, flags, input files or output location.
    Config(String),
    /// The model could not be evaluated at the requested operating point.
    Model(VesError),
    /// One or more verification claims failed.
    Property(Vec<&'static str>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Model(_) => EXIT_MODEL,
            CliError::Property(_) => EXIT_PROPERTY,
        }
    }
}

impl From<VesError> for CliError {
    fn from(e: VesError) -> Self {
        if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Model(e)
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(format!("csv: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Model(e) => write!(f, "model error: {e}"),
            CliError::Property(names) => write!(f, "failed claims: {}", names.join(", ")),
        }
    }
}

impl std::error::Error for CliError {}
