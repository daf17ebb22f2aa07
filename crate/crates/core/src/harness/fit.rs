//! Log-log slope fits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::study::ConvergenceRecord;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points, got {0}")]
    InsufficientPoints(usize),
    #[error("error values must be positive and finite (point {index}: {value})")]
    NonPositive { index: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(log x, log y)`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit, FitError> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return Err(FitError::InsufficientPoints(n));
    }
    for (index, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        for value in [x, y] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(FitError::NonPositive { index, value });
            }
        }
    }
    let lx: Vec<f64> = xs[..n].iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys[..n].iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n as f64;
    let my = ly.iter().sum::<f64>() / n as f64;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FitError::InsufficientPoints(1));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(SlopeFit { slope, intercept, r_squared })
}

/// Records of one curve: same method label, metric and parameter, and seed.
pub fn select<'a>(
    records: &'a [ConvergenceRecord],
    method: &str,
    metric: &str,
    s_or_point: &str,
    seed: Option<u64>,
) -> Vec<&'a ConvergenceRecord> {
    records
        .iter()
        .filter(|r| r.method == method && r.metric == metric && r.s_or_point == s_or_point && r.seed == seed)
        .collect()
}

/// Slope of `error` against `N` for one curve.
pub fn fit_records(records: &[&ConvergenceRecord]) -> Result<SlopeFit, FitError> {
    let xs: Vec<f64> = records.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.error).collect();
    fit_slope(&xs, &ys)
}
