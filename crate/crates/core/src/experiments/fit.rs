//! Log-log slope fits of outage curves.

use crate::error::{Error, Result};
use crate::montecarlo::MIN_FAILURES;

use super::Record;

/// Default automatic window: points with `P_LOW < p_hat < P_HIGH`.
pub const P_LOW: f64 = 1e-5;
pub const P_HIGH: f64 = 1e-2;

/// Which points of a curve enter a slope fit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FitWindow {
    /// Points with `P_LOW < p_hat < P_HIGH`.
    #[default]
    Auto,
    /// Points with `lo <= rho_db <= hi`.
    Snr(f64, f64),
    /// Points with `lo <= p_hat < hi`.
    Probability(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    /// Diversity estimate, the negated slope of `log10 p` against `rho_db / 10`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// SNR span (dB) of the points actually used.
    pub window: (f64, f64),
    pub points_used: usize,
}

/// Ordinary least squares of `y` on `x`: `(slope, intercept, r_squared)`.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (slope, intercept, r2)
}

/// Fits the outage decay of one user's rows.
///
/// Rows without `p_hat`/`rho_db`, with `p_hat == 0` or with fewer than
/// [`MIN_FAILURES`] failures are skipped, as are points outside `window`.
pub fn fit_diversity(rows: &[Record], window: FitWindow) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            let (rho_db, p) = (r.rho_db?, r.p_hat?);
            if p <= 0.0 || r.failures.is_some_and(|f| f < MIN_FAILURES) {
                return None;
            }
            let inside = match window {
                FitWindow::Auto => p > P_LOW && p < P_HIGH,
                FitWindow::Snr(lo, hi) => rho_db >= lo && rho_db <= hi,
                FitWindow::Probability(lo, hi) => p >= lo && p < hi,
            };
            inside.then_some((rho_db / 10.0, p.log10()))
        })
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "slope fit needs at least 3 usable points, found {}",
            points.len()
        )));
    }
    let (slope, intercept, r_squared) = least_squares(&points);
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) * 10.0;
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max) * 10.0;
    Ok(SlopeFit {
        slope: -slope,
        intercept,
        r_squared,
        window: (lo, hi),
        points_used: points.len(),
    })
}
