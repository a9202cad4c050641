//! Command-line front end: streaming counts, a randomized self-test and a
//! throughput benchmark emitting CSV.

pub mod bench;
pub mod count;
pub mod perf;
pub mod selftest;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Count(#[from] pospopcnt::Error),
    #[error("{0}")]
    Usage(String),
    #[error("self-test failed")]
    SelftestFailed,
}

impl CliError {
    /// 2 for bad arguments or malformed input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Count(pospopcnt::Error::WordIncomplete { .. }) => 2,
            CliError::Count(pospopcnt::Error::UnknownKernel) => 2,
            CliError::Count(pospopcnt::Error::KernelUnavailable(_)) => 1,
            CliError::Io(_) | CliError::SelftestFailed => 1,
        }
    }
}
