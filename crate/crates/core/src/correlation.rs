//! Pearson (and Spearman) correlation with Fisher-z confidence intervals.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CorrelationError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 4 observations, got {0}")]
    TooFew(usize),
    #[error("correlation undefined: constant input")]
    Constant,
    #[error("confidence level must lie in (0, 1), got {0}")]
    Level(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub r: f64,
    pub lower: f64,
    pub upper: f64,
    pub half_width: f64,
    pub n: usize,
}

impl CorrelationEstimate {
    /// `0.93 ± 0.01` style display: both values to two decimals, the
    /// (asymmetric) interval summarized by its half width.
    pub fn display_pm(&self) -> String {
        format!("{:.2} ± {:.2}", self.r, self.half_width)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Pearson,
    Spearman,
}

pub fn pearson_correlation_ci(
    x: &[f64],
    y: &[f64],
    level: f64,
) -> Result<CorrelationEstimate, CorrelationError> {
    check_inputs(x, y, level)?;
    let r = pearson_r(x, y)?;
    Ok(fisher_interval(r, x.len(), level))
}

/// Spearman rank correlation (average ranks for ties) with the same
/// Fisher-z interval applied to the rank correlation.
pub fn spearman_correlation_ci(
    x: &[f64],
    y: &[f64],
    level: f64,
) -> Result<CorrelationEstimate, CorrelationError> {
    check_inputs(x, y, level)?;
    let r = pearson_r(&ranks(x), &ranks(y))?;
    Ok(fisher_interval(r, x.len(), level))
}

pub fn correlation_ci(
    method: Method,
    x: &[f64],
    y: &[f64],
    level: f64,
) -> Result<CorrelationEstimate, CorrelationError> {
    match method {
        Method::Pearson => pearson_correlation_ci(x, y, level),
        Method::Spearman => spearman_correlation_ci(x, y, level),
    }
}

fn check_inputs(x: &[f64], y: &[f64], level: f64) -> Result<(), CorrelationError> {
    if x.len() != y.len() {
        return Err(CorrelationError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 4 {
        return Err(CorrelationError::TooFew(x.len()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(CorrelationError::Level(level));
    }
    Ok(())
}

fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, CorrelationError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(CorrelationError::Constant);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    // exact linear relations land within rounding of +-1
    Ok(if 1.0 - r.abs() < 1e-12 { r.signum() } else { r })
}

/// Two-sided interval from `atanh(r) ± z_{(1+level)/2} / sqrt(n - 3)`,
/// mapped back through `tanh`. `|r| = 1` gives the degenerate `[r, r]`.
pub fn fisher_interval(r: f64, n: usize, level: f64) -> CorrelationEstimate {
    if r.abs() >= 1.0 || n <= 3 {
        let (lower, upper) = if r.abs() >= 1.0 { (r, r) } else { (-1.0, 1.0) };
        return CorrelationEstimate {
            r,
            lower,
            upper,
            half_width: (upper - lower) / 2.0,
            n,
        };
    }
    let z = r.atanh();
    let se = 1.0 / ((n - 3) as f64).sqrt();
    let q = normal_quantile(0.5 + level / 2.0);
    let lower = (z - q * se).tanh();
    let upper = (z + q * se).tanh();
    CorrelationEstimate {
        r,
        lower,
        upper,
        half_width: (upper - lower) / 2.0,
        n,
    }
}

fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// 1-based ranks with ties sharing their average rank.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}
