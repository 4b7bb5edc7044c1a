use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source_label}:{line}:{column}: schema error at `{field}`: {message}")]
    Schema { source_label: String, line: usize, column: usize, field: String, message: String },
    #[error("{source_label}: invalid value at `{field}`: {message}")]
    Invalid { source_label: String, field: String, message: String },
    #[error("unknown catalog entry `{0}`")]
    UnknownFixture(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("bad flag {flag}: {message}")]
    Flag { flag: &'static str, message: String },
    #[error("analysis failed: {0}")]
    Analysis(#[from] slopekit::Error),
}

impl CliError {
    /// Every input problem maps to the schema exit code; a violated
    /// implication inside an analysis is a property failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Analysis(slopekit::Error::ImplicationViolated { .. }) => EXIT_PROPERTY,
            _ => EXIT_SCHEMA,
        }
    }
}
