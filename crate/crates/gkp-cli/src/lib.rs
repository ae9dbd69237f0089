//! Command-line front end: argument parsing, command runners and artifact output.

pub mod args;
pub mod commands;
pub mod output;

use gkp_channels::Error;

/// Process exit status for a failed run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Argument(_) | Error::Domain(_) | Error::Fit(_) => 2,
        Error::Convergence(_) => 3,
        Error::Oracle(_) | Error::Cutoff(_) => 4,
        Error::Io(_) | Error::Json(_) => 1,
    }
}
