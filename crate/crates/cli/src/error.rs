use sieve_core::SieveError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("budget: {0}")]
    Budget(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] SieveError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
