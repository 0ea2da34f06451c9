use std::fmt;

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    /// `certify` found no equilibrium, or a run exceeded its tolerances.
    pub const REJECTED: u8 = 1;
    pub const SCHEMA: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const INFEASIBLE: u8 = 4;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    /// Input that does not match the schema; `path` names the offending field.
    pub fn schema(path: impl fmt::Display, reason: impl fmt::Display) -> Self {
        Self {
            code: exit::SCHEMA,
            message: format!("schema error at `{path}`: {reason}"),
        }
    }

    pub fn numerical(analysis: &str, err: impl fmt::Display) -> Self {
        Self {
            code: exit::NUMERICAL,
            message: format!("analysis `{analysis}` aborted: {err}"),
        }
    }

    pub fn io(what: impl fmt::Display, err: std::io::Error) -> Self {
        Self {
            code: exit::NUMERICAL,
            message: format!("{what}: {err}"),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}
