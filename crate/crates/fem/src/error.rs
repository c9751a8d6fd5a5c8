use gapstress_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum FemError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("mesh generation failed: {0}")]
    Mesh(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("linear solve failed: {0}")]
    Solver(String),
    #[error("point ({0}, {1}) lies outside the mesh")]
    OutsideMesh(f64, f64),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, FemError>;
