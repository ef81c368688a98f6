//! Log–log least-squares slope fits.

use crate::error::{Error, Result};

/// Points per sliding window.
pub const WINDOW: usize = 6;
/// Spread of windowed slopes above which the data count as curved.
pub const CURVATURE_SPREAD: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    /// log₁₀ of the prefactor.
    pub intercept: f64,
    pub r2: f64,
    /// log₁₀ y minus the fitted line, per point.
    pub residuals: Vec<f64>,
    /// Vanishing order L, when known; the reference exponent is 2L/(2L+1).
    pub order: Option<usize>,
    pub windowed: Vec<f64>,
    pub curvature: bool,
}

/// `2L/(2L+1)`.
pub fn theoretical_exponent(order: usize) -> f64 {
    2.0 * order as f64 / (2.0 * order as f64 + 1.0)
}

/// `"2L/(2L+1)"` as a reduced fraction, e.g. "4/5".
pub fn exponent_label(order: usize) -> String {
    format!("{}/{}", 2 * order, 2 * order + 1)
}

fn line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

impl ScalingFit {
    pub fn theoretical(&self) -> Option<f64> {
        self.order.map(theoretical_exponent)
    }

    pub fn spread(&self) -> f64 {
        let lo = self.windowed.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self
            .windowed
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if self.windowed.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

/// Fits log₁₀ y = slope · log₁₀ x + intercept over positive pairs.
pub fn fit_slope(points: &[(f64, f64)], order: Option<usize>) -> Result<ScalingFit> {
    if points.len() < WINDOW {
        return Err(Error::InsufficientData(format!(
            "slope fit needs ≥ {WINDOW} points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidInput(
            "log–log fit needs positive data".into(),
        ));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let (slope, intercept) = line(&x, &y);
    let residuals: Vec<f64> = x
        .iter()
        .zip(&y)
        .map(|(a, b)| b - (slope * a + intercept))
        .collect();
    let my = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let r2 = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let windowed: Vec<f64> = (0..=x.len() - WINDOW)
        .map(|i| line(&x[i..i + WINDOW], &y[i..i + WINDOW]).0)
        .collect();
    let mut fit = ScalingFit {
        slope,
        intercept,
        r2,
        residuals,
        order,
        windowed,
        curvature: false,
    };
    fit.curvature = fit.spread() > CURVATURE_SPREAD;
    Ok(fit)
}
