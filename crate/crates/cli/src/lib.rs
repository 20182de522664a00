//! Command-line surface of the strong coincidence search.
//!
//! Exit codes: 0 success, 1 a pending pair or limit-reached substitution
//! (possible counterexample), 2 bad flags or unparsable input, 3 I/O failure.

pub mod commands;
pub mod diagnostic;
pub mod shards;

use std::process::ExitCode;

/// Error carrying the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 2,
            error: error.into(),
        }
    }

    pub fn io(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 3,
            error: error.into(),
        }
    }
}

impl From<pisot_search::pipeline::SearchError> for Failure {
    fn from(e: pisot_search::pipeline::SearchError) -> Self {
        use pisot_search::pipeline::SearchError as E;
        match e {
            E::Io(_) | E::CorruptCheckpoint(_) => Failure::io(e),
            _ => Failure::usage(e),
        }
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    /// Something needs a rerun at a higher limit.
    Pending,
}

impl Outcome {
    pub fn exit_code(self) -> ExitCode {
        match self {
            Outcome::Clean => ExitCode::SUCCESS,
            Outcome::Pending => ExitCode::from(1),
        }
    }
}
