use serde::{Deserialize, Serialize};

use crate::eigen::Spectrum;
use crate::error::{Error, Result};

/// Minimum number of eigenvalues in a fit window.
pub const MIN_FIT_POINTS: usize = 10;
/// Fraction of the spectrum above which discretization effects dominate.
pub const UPPER_TAIL_FRACTION: f64 = 0.8;

/// Number of eigenvalues strictly below `lambda`.
pub fn counting_function(spec: &Spectrum, lambda: f64) -> usize {
    spec.eigenvalues.partition_point(|&l| l < lambda)
}

/// Eigenvalue at a fractional position of the sorted spectrum.
pub fn percentile(spec: &Spectrum, frac: f64) -> f64 {
    let m = spec.len();
    assert!(m > 0, "empty spectrum");
    let idx = ((m - 1) as f64 * frac.clamp(0.0, 1.0)).round() as usize;
    spec.eigenvalues[idx]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylFit {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
    /// The window reaches into the top fifth of the spectrum.
    pub touches_upper_tail: bool,
}

/// Least-squares fit of `log N` against `log λ` at the eigenvalues inside
/// `[lambda_lo, lambda_hi]`, where `N` is the count just above each eigenvalue.
pub fn weyl_slope(spec: &Spectrum, lambda_lo: f64, lambda_hi: f64) -> Result<WeylFit> {
    let ev = &spec.eigenvalues;
    let start = ev.partition_point(|&l| l < lambda_lo);
    let end = ev.partition_point(|&l| l <= lambda_hi);
    let found = end.saturating_sub(start);
    if found < MIN_FIT_POINTS {
        return Err(Error::WindowTooSmall {
            found,
            required: MIN_FIT_POINTS,
        });
    }
    let pts: Vec<(f64, f64)> = ev[start..end]
        .iter()
        .map(|&l| (l.ln(), (ev.partition_point(|&x| x <= l) as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::WindowTooSmall {
            found: 1,
            required: MIN_FIT_POINTS,
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    let tail_idx = ((ev.len() - 1) as f64 * UPPER_TAIL_FRACTION).round() as usize;
    Ok(WeylFit {
        lambda_lo,
        lambda_hi,
        slope,
        intercept,
        r2,
        points: found,
        touches_upper_tail: end > tail_idx + 1,
    })
}
