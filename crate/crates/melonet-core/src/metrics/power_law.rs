//! Log-log least squares on the degree distribution: P(k) ~ k^-lambda
//! shows up as a line of slope -lambda, and r^2 says how line-like the
//! points are.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    /// -slope of the regression line; positive for decaying distributions.
    pub lambda: Option<f64>,
    pub r_squared: Option<f64>,
    pub scale_free: bool,
    pub r_squared_threshold: f64,
    /// Number of degrees with P(k) > 0 and k >= 1 that entered the fit.
    pub support_points: usize,
    /// Set instead of lambda/r_squared when support_points < 3.
    pub insufficient_support: bool,
}

/// Fit over (log k, log P(k)) for k >= 1 with P(k) > 0. Fewer than 3
/// support points is reported as insufficient rather than fitted.
pub fn fit_power_law(distribution: &BTreeMap<usize, f64>, r_squared_threshold: f64) -> PowerLawFit {
    let points: Vec<(f64, f64)> = distribution
        .iter()
        .filter(|(k, p)| **k >= 1 && **p > 0.0)
        .map(|(k, p)| ((*k as f64).ln(), p.ln()))
        .collect();
    if points.len() < 3 {
        return PowerLawFit {
            lambda: None,
            r_squared: None,
            scale_free: false,
            r_squared_threshold,
            support_points: points.len(),
            insufficient_support: true,
        };
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| {
            let predicted = mean_y + slope * (x - mean_x);
            (y - predicted).powi(2)
        })
        .sum();
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    // flat data: zero total variance means the line explains everything
    // that is there, unless the residuals disagree
    let r_squared = if ss_tot <= f64::EPSILON {
        if ss_res <= f64::EPSILON {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    PowerLawFit {
        lambda: Some(-slope),
        r_squared: Some(r_squared),
        scale_free: r_squared >= r_squared_threshold,
        r_squared_threshold,
        support_points: points.len(),
        insufficient_support: false,
    }
}
