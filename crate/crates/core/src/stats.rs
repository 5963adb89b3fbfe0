//! Means and error bars for Monte Carlo series.
//!
//! Each chain's series is split into bins to absorb autocorrelation; the
//! binned error is compared with the spread of per-chain means and the larger
//! of the two is reported.

use alloc::vec::Vec;

use crate::error::StatsError;

/// Bins per chain used for the binning error estimate.
pub const BINS_PER_CHAIN: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn new(mean: f64, stderr: f64) -> Self {
        Estimate { mean, stderr }
    }

    /// Whether `target` lies within `tol` of the mean.
    pub fn within(&self, target: f64, tol: f64) -> bool {
        libm::fabs(self.mean - target) <= tol
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the mean of `xs` from `bins` equal bins.
///
/// Trailing samples that do not fill a bin are dropped from the error (but
/// not from the mean computed elsewhere).
pub fn binned_stderr(xs: &[f64], bins: usize) -> f64 {
    let bins = bins.min(xs.len());
    if bins < 2 {
        return 0.0;
    }
    let width = xs.len() / bins;
    let means: Vec<f64> = xs[..width * bins].chunks(width).map(mean).collect();
    libm::sqrt(variance(&means) / bins as f64)
}

/// Pools per-chain series into one estimate.
pub fn pooled(chains: &[Vec<f64>]) -> Result<Estimate, StatsError> {
    let total: usize = chains.iter().map(Vec::len).sum();
    if total < 2 {
        return Err(StatsError::TooFewSamples { need: 2, got: total });
    }
    let all_mean = chains.iter().flatten().sum::<f64>() / total as f64;
    let mut var_binned = 0.0;
    for c in chains.iter().filter(|c| !c.is_empty()) {
        let w = c.len() as f64 / total as f64;
        let se = binned_stderr(c, BINS_PER_CHAIN);
        var_binned += w * w * se * se;
    }
    let chain_means: Vec<f64> = chains.iter().filter(|c| !c.is_empty()).map(|c| mean(c)).collect();
    let across = if chain_means.len() >= 2 {
        libm::sqrt(variance(&chain_means) / chain_means.len() as f64)
    } else {
        0.0
    };
    Ok(Estimate::new(all_mean, libm::sqrt(var_binned).max(across)))
}

/// Least-squares line `y = a + b x`, returning `(a, b)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (my - slope * mx, slope)
}
