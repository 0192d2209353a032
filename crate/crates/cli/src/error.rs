use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    ParseConfig {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("cannot read grid {path}: {source}")]
    Grid {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("cannot write {path}: {detail}")]
    Write { path: String, detail: String },
    #[error(transparent)]
    Core(#[from] nlbm_core::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical or I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } | CliError::ParseConfig { .. } | CliError::Grid { .. } => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) | CliError::Write { .. } => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
