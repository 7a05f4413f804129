//! Least-squares exponents in the coordinates `log(1/α - 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    /// Surviving `(α, value)` pairs.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log coordinates.
    pub residual: f64,
    /// Smallest and largest α used.
    pub window: (f64, f64),
    pub dropped: usize,
    /// Subtracted from each value before taking logarithms.
    pub shift: f64,
}

impl ExponentFit {
    /// Fitted `value - shift` at level `alpha`.
    pub fn predict(&self, alpha: f64) -> f64 {
        (self.intercept + self.slope * (1.0 / alpha - 1.0).ln()).exp()
    }
}

/// Fits `log(value - shift) = intercept + slope · log(1/α - 1)`.
///
/// Points with `value <= shift` or `α` outside `(0, 1)` are dropped with a
/// warning; fewer than five survivors is an error.
pub fn fit_loglog(points: &[(f64, f64)], shift: f64) -> Result<ExponentFit> {
    let mut kept = Vec::with_capacity(points.len());
    let mut dropped = 0;
    for &(alpha, value) in points {
        if alpha > 0.0 && alpha < 1.0 && value - shift > 0.0 && value.is_finite() {
            kept.push((alpha, value));
        } else {
            log::warn!("dropping point alpha={alpha} value={value}: log undefined");
            dropped += 1;
        }
    }
    if kept.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints(kept.len()));
    }
    let xy: Vec<(f64, f64)> = kept
        .iter()
        .map(|&(a, v)| ((1.0 / a - 1.0).ln(), (v - shift).ln()))
        .collect();
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "all levels coincide".into(),
        });
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xy
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    let lo = kept.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = kept.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExponentFit {
        points: kept,
        slope,
        intercept,
        residual,
        window: (lo, hi),
        dropped,
        shift,
    })
}

/// Exponent of `value - 1` as `α → 1`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    fit_loglog(points, 1.0)
}

/// The ladder `α = 1 - 2^{-k}`.
pub fn dyadic_ladder(ks: std::ops::RangeInclusive<i32>) -> Vec<f64> {
    ks.map(|k| 1.0 - 2f64.powi(-k)).collect()
}
