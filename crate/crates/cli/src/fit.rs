//! Ordinary least squares on log2-transformed data, for the power-law
//! scaling fits reported by the sweeps.

use anyhow::{bail, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `log2 y = slope · log2 x + intercept`.
///
/// Points with non-positive coordinates cannot be log-transformed and are
/// rejected. Needs at least two distinct abscissae. `r_squared` is clamped
/// to [0, 1]; perfectly constant data fits exactly (slope 0, r² = 1).
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<FitResult> {
    for &(x, y) in points {
        if x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite() {
            bail!("log-log fit needs positive finite points, got ({x}, {y})");
        }
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.log2(), y.log2())).collect();
    let n = logs.len() as f64;
    let first = logs.first().map(|&(x, _)| x);
    if logs.iter().all(|&(x, _)| Some(x) == first) {
        bail!("log-log fit needs at least two distinct abscissae");
    }
    let mean_x = logs.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_y = logs.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let syy: f64 = logs.iter().map(|&(_, y)| (y - mean_y) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - (syy - slope * sxy) / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult { slope, intercept, r_squared, points: logs.len() })
}
