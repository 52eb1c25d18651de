//! Ordinary least squares on log-log axes.

use serde::{Deserialize, Serialize};

/// Values at or below this are treated as numerical noise and excluded from fits.
pub const NUMERICAL_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Exponent `p` in `y ≈ e^intercept · x^p`.
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in `ln y`.
    pub max_residual: f64,
    /// Number of points that entered the fit.
    pub points: usize,
}

impl PowerLawFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Fits `ln y = intercept + slope · ln x` over the points with `y > floor` and
/// `x > 0`. Returns `None` when fewer than two points survive or all surviving
/// `x` coincide.
pub fn fit_power_law(xs: &[f64], ys: &[f64], floor: f64) -> Option<PowerLawFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > floor && y.is_finite())
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let max_residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Some(PowerLawFit {
        slope,
        intercept,
        max_residual,
        points: pts.len(),
    })
}

/// `count` points evenly spaced in `ln x` from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}
