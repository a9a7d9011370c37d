//! Classical no-feature baselines.
//!
//! When every observation shares the same features, the learning problem
//! collapses to the classical single-quantity newsvendor problem, whose
//! optimal order is the demand distribution's quantile at the critical
//! fractile `cp / (cp + ch)`. These two functions are that closed form for
//! a normal demand model and for a raw demand sample.

use crate::error::{Error, Result};
use crate::losses::CostPair;
use crate::stats::std_normal_inv_cdf;

/// Optimal order for normally distributed demand:
/// `mu + sigma · Φ⁻¹(cp / (cp + ch))`.
pub fn classical_normal_order(mu: f64, sigma: f64, c: &CostPair) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!(
            "classical_normal_order: sigma must be positive, got {sigma}"
        )));
    }
    Ok(mu + sigma * std_normal_inv_cdf(c.fractile())?)
}

/// Smallest sample value whose empirical CDF reaches the critical
/// fractile. This is the smallest minimizer of the empirical newsvendor
/// cost over the sample.
pub fn empirical_quantile_order(demands: &[f64], c: &CostPair) -> Result<f64> {
    if demands.is_empty() {
        return Err(Error::EmptyDataset("empirical_quantile_order"));
    }
    let mut sorted = demands.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite demands"));
    let n = sorted.len();
    // Left-continuous generalized inverse: rank = ⌈q·n⌉, guarded against
    // the fractile landing a rounding error above an exact integer.
    let rank = ((c.fractile() * n as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok(sorted[rank.min(n) - 1])
}
