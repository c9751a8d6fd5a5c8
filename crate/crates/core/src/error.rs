use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("ellipticity violated: mu = {mu}, d*lambda + 2*mu = {combo}")]
    NotElliptic { mu: f64, combo: f64 },
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("normal vector has length {0}, expected 1")]
    NonUnitNormal(f64),
    #[error("rigid motion index {alpha} out of range for d = {d}")]
    InvalidIndex { alpha: usize, d: usize },
    #[error("transverse coordinate {0} outside the chart")]
    OutOfChart(f64),
    #[error("point outside the narrow region")]
    OutsideNarrowRegion,
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("integral diverges for d = {d}, m = {m}, tilde = {tilde}")]
    Divergent { d: usize, m: u32, tilde: bool },
    #[error("epsilon {0} outside (0, 1/2)")]
    EpsOutOfRange(f64),
    #[error("no leading-order law for d = {d}, m = {m}, alpha = {alpha}")]
    Uncovered { d: usize, m: u32, alpha: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
