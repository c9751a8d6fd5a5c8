//! Least-squares rate fits and additive-constant estimates.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{HarnessError, Result};

/// Power law `value ~ prefactor * eps^exponent` fitted on log-log data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFitResult {
    pub exponent: f64,
    pub prefactor: f64,
    /// Log-space residuals in input order (dropped points excluded).
    pub residuals: Vec<f64>,
    /// 95% confidence half-width of the exponent; infinite with 2 points.
    pub half_width: f64,
    /// Number of coarse points left out by the robust variant.
    pub dropped: usize,
}

/// Linear law `value ~ intercept + slope * |log eps|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

struct Line {
    slope: f64,
    intercept: f64,
    residuals: Vec<f64>,
    slope_se: f64,
}

fn line_fit(x: &[f64], y: &[f64]) -> Line {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let slope_se = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    Line { slope, intercept, residuals, slope_se }
}

fn check_series(series: &[(f64, f64)], min: usize) -> Result<()> {
    if series.len() < min {
        return Err(HarnessError::Fit(format!("need at least {min} points, got {}", series.len())));
    }
    if let Some((e, v)) = series.iter().find(|(e, v)| !(*e > 0.0 && e.is_finite() && v.is_finite())) {
        return Err(HarnessError::Fit(format!("bad point ({e}, {v})")));
    }
    let mut eps: Vec<f64> = series.iter().map(|p| p.0).collect();
    eps.sort_by(f64::total_cmp);
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(HarnessError::Fit("repeated eps".into()));
    }
    Ok(())
}

/// Slope of `log value` against `log eps`.
pub fn fit_rate(series: &[(f64, f64)]) -> Result<RateFitResult> {
    check_series(series, 3)?;
    if let Some((e, v)) = series.iter().find(|p| p.1 <= 0.0) {
        return Err(HarnessError::Fit(format!("nonpositive value {v} at eps {e}")));
    }
    let x: Vec<f64> = series.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = series.iter().map(|p| p.1.ln()).collect();
    let line = line_fit(&x, &y);
    let dof = series.len() as f64 - 2.0;
    let t = StudentsT::new(0.0, 1.0, dof).map_err(|e| HarnessError::Fit(e.to_string()))?;
    let half_width = t.inverse_cdf(0.975) * line.slope_se;
    if !line.slope.is_finite() {
        return Err(HarnessError::Fit("exponent is not finite".into()));
    }
    Ok(RateFitResult {
        exponent: line.slope,
        prefactor: line.intercept.exp(),
        residuals: line.residuals,
        half_width,
        dropped: 0,
    })
}

/// [`fit_rate`], refitted without the coarsest point when its residual
/// exceeds three times the median residual (and at least 3 points remain).
/// Log residuals below `1e-8` count as round-off and never trigger a drop.
pub fn fit_rate_robust(series: &[(f64, f64)]) -> Result<RateFitResult> {
    let full = fit_rate(series)?;
    if series.len() < 4 {
        return Ok(full);
    }
    let coarsest = (0..series.len()).max_by(|&a, &b| series[a].0.total_cmp(&series[b].0)).expect("non-empty");
    let mut abs: Vec<f64> = full.residuals.iter().map(|r| r.abs()).collect();
    let worst = abs[coarsest];
    abs.sort_by(f64::total_cmp);
    let median = if abs.len() % 2 == 1 {
        abs[abs.len() / 2]
    } else {
        0.5 * (abs[abs.len() / 2 - 1] + abs[abs.len() / 2])
    };
    if worst > 3.0 * median && worst > 1e-8 {
        let rest: Vec<(f64, f64)> = series.iter().enumerate().filter(|(k, _)| *k != coarsest).map(|(_, p)| *p).collect();
        let mut refit = fit_rate(&rest)?;
        refit.dropped = 1;
        return Ok(refit);
    }
    Ok(full)
}

/// Fit for quantities tagged logarithmic (`value ~ |log eps|`).
pub fn fit_log(series: &[(f64, f64)]) -> Result<LogFitResult> {
    check_series(series, 3)?;
    let x: Vec<f64> = series.iter().map(|p| p.0.ln().abs()).collect();
    let y: Vec<f64> = series.iter().map(|p| p.1).collect();
    let line = line_fit(&x, &y);
    Ok(LogFitResult { slope: line.slope, intercept: line.intercept, residuals: line.residuals })
}

/// Additive constant left after subtracting a known leading term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub constant: f64,
    /// `value - leading - constant`, ordered by decreasing eps.
    pub residuals: Vec<f64>,
    /// The remainder changes more between the two finest points than
    /// between the two coarsest, which hints at a wrong leading law.
    pub trend_growing: bool,
}

pub fn estimate_constant(series: &[(f64, f64)], leading: impl Fn(f64) -> f64) -> Result<ConstantEstimate> {
    check_series(series, 3)?;
    let mut pts = series.to_vec();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let rem: Vec<f64> = pts.iter().map(|&(e, v)| v - leading(e)).collect();
    if rem.iter().any(|r| !r.is_finite()) {
        return Err(HarnessError::Fit("leading term is not finite on the ladder".into()));
    }
    let constant = rem.iter().sum::<f64>() / rem.len() as f64;
    let residuals = rem.iter().map(|r| r - constant).collect();
    let first = (rem[1] - rem[0]).abs();
    let last = (rem[rem.len() - 1] - rem[rem.len() - 2]).abs();
    let scale = rem.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let trend_growing = last > first + 1e-12 * scale.max(1.0);
    Ok(ConstantEstimate { constant, residuals, trend_growing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_are_rejected_and_zero_values_too() {
        assert!(fit_rate(&[(0.1, 1.0), (0.05, 2.0)]).is_err());
        assert!(fit_rate(&[(0.1, 1.0), (0.05, 0.0), (0.02, 3.0)]).is_err());
        assert!(fit_rate(&[(0.1, 1.0), (0.1, 2.0), (0.02, 3.0)]).is_err());
    }

    #[test]
    fn log_law() {
        let s: Vec<(f64, f64)> = [0.1, 0.01, 0.001].iter().map(|&e: &f64| (e, 2.0 + 3.0 * e.ln().abs())).collect();
        let f = fit_log(&s).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12 && (f.intercept - 2.0).abs() < 1e-12);
    }

    #[test]
    fn robust_fit_drops_a_pre_asymptotic_point() {
        // one endpoint outlier only stands out by 3x the median residual from 8 points on
        let mut s: Vec<(f64, f64)> = (0..8).map(|k| 0.08 / 2f64.powi(k)).map(|e| (e, e.powf(-0.5))).collect();
        s[0].1 *= 1.5;
        let f = fit_rate_robust(&s).unwrap();
        assert_eq!(f.dropped, 1);
        assert!((f.exponent + 0.5).abs() < 1e-12);
    }
}
