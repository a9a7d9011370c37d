//! Standard-normal CDF and its inverse.
//!
//! The inverse CDF is computed by bisection on an erf-series CDF instead of
//! a rational approximation. Speed is irrelevant at this scale and the
//! series is easy to verify term by term.

use std::f64::consts::FRAC_2_SQRT_PI;

use crate::error::{Error, Result};

/// Error function via the all-positive-terms series
/// `erf(x) = (2/√π) x e^{-x²} Σ (2x²)ⁿ / (1·3···(2n+1))`,
/// which avoids the cancellation of the alternating Taylor series.
pub fn erf(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    // erf(6) is already 1 to within 2.2e-17.
    if x.abs() >= 6.0 {
        return 1.0_f64.copysign(x);
    }
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..400 {
        term *= 2.0 * x2 / (2.0 * n as f64 + 1.0);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    FRAC_2_SQRT_PI * x * (-x2).exp() * sum
}

/// Standard-normal CDF `Φ(z)`.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Inverse standard-normal CDF: the `z` with `Φ(z) = p` to within 1e-9.
///
/// `p` must lie strictly inside `(0, 1)`. Accuracy is in CDF space; in the
/// extreme tails (|z| beyond ~8) the returned quantile saturates because
/// `Φ` is flat there at `f64` resolution.
pub fn std_normal_inv_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!(
            "std_normal_inv_cdf: p = {p} outside (0, 1)"
        )));
    }
    let mut lo = -16.0;
    let mut hi = 16.0;
    let mut mid = 0.0;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let c = std_normal_cdf(mid);
        if c == p {
            return Ok(mid);
        }
        if c < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(mid)
}
