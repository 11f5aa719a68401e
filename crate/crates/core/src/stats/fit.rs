use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

/// Least-squares line through `(log n, log metric)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residual_max: f64,
    pub log_points: Vec<(f64, f64)>,
}

impl ExponentFit {
    pub fn predict(&self, n: f64) -> f64 {
        (self.intercept + self.slope * n.ln()).exp()
    }
}

pub fn exponent_fit(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(WalkError::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    for (index, &(n, metric)) in points.iter().enumerate() {
        if metric.is_nan() || metric <= 0.0 {
            return Err(WalkError::NonPositive { index, value: metric });
        }
        if n.is_nan() || n <= 0.0 {
            return Err(WalkError::NonPositive { index, value: n });
        }
    }
    let log_points: Vec<(f64, f64)> = points.iter().map(|&(n, m)| (n.ln(), m.ln())).collect();
    let k = log_points.len() as f64;
    let mx = log_points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = log_points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = log_points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = log_points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = log_points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(WalkError::Range("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = log_points.iter().map(|p| p.1 - (intercept + slope * p.0));
    let (ss_res, residual_max) = residuals.fold((0.0, 0.0f64), |(s, m), r| (s + r * r, m.max(r.abs())));
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(ExponentFit {
        slope,
        intercept,
        r_squared,
        residual_max,
        log_points,
    })
}
