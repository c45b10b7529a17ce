//! Process exit policy.
//!
//! Exit 0: the run completed and every requested artifact was written.
//! Exit 2: the request itself was unusable — unreadable or malformed
//!         config, schema violations, parameter values outside their
//!         domains, or an option combination the grammar rejects.
//! Exit 3: the request was well-formed but the computation failed —
//!         stability-limit violations, step-size underflow, field blow-up,
//!         a search that found nothing, or an output that could not be
//!         written once the run had started.

use std::fmt;
use std::process::ExitCode;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub type CmdResult<T> = Result<T, Failure>;

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }

    pub fn exit(&self) -> ExitCode {
        eprintln!("error: {}", self.message);
        ExitCode::from(self.code)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<slowfast::Error> for Failure {
    fn from(e: slowfast::Error) -> Self {
        use slowfast::Error::*;
        let code = match e {
            // The caller supplied something outside the model's domain, or
            // asked for an entry level with no exit: a request problem.
            InvalidInput(_) | NoExit(_) | NotApplicable(_) => EXIT_CONFIG,
            // Everything else went wrong while computing.
            _ => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}
