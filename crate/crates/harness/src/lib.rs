//! Batch driver: epsilon sweeps over the finite element oracle, rate fits,
//! comparison with the asymptotic formulas, reports and acceptance checks.

pub mod config;
pub mod error;
pub mod fit;
pub mod report;
pub mod sweep;
pub mod verify;

pub use config::{GeometryKind, Preset, SweepConfig, halving_ladder};
pub use error::{HarnessError, Result};
pub use fit::{ConstantEstimate, LogFitResult, RateFitResult, estimate_constant, fit_log, fit_rate, fit_rate_robust};
pub use report::{render, write_report};
pub use sweep::{Failure, Row, SweepResult, read_rows, run_sweep, write_outputs, write_rows_csv};
pub use verify::{CriterionResult, KNOWN_RED, Suite, SweepId, run_criterion, verify};
