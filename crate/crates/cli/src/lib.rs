//! Command-line driver: runs one model, collects checks and certificates
//! into a schema-versioned report and writes JSON or a CSV bundle.

pub mod cli;
pub mod params;
pub mod report;
pub mod run;

pub use report::{emit_report, Check, Report, RunConfig, Table, SCHEMA_VERSION};

/// Bad flags, parameters or paths; exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

/// Exit code for an error raised by a run.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return exit::USAGE;
    }
    match err.downcast_ref::<bslab::Error>() {
        Some(bslab::Error::Usage(_) | bslab::Error::Truncation { .. } | bslab::Error::OnCut { .. }) => exit::USAGE,
        Some(bslab::Error::AssumptionViolated(_) | bslab::Error::TheoremViolation(_)) => exit::CHECK_FAILED,
        _ => exit::NUMERICAL,
    }
}
