use gapstress_core::CoreError;
use gapstress_fem::FemError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("missing input: {0}")]
    Missing(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl HarnessError {
    /// Process exit code: everything here is a usage or I/O problem.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
