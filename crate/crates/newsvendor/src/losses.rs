//! The two competing training objectives.
//!
//! The original newsvendor loss charges the shortage cost `cp` per unit of
//! unmet demand and the holding cost `ch` per unit of leftover stock:
//!
//! ```text
//! cost(d, y) = Σ_k  cp·max(d_k − y_k, 0) + ch·max(y_k − d_k, 0)
//! ```
//!
//! It is piecewise linear in the order vector `y`, which is exactly why it
//! can be decomposed into two ReLU units ([`cost_via_relu`]) and trained by
//! backpropagation with the indicator subgradient of [`loss_grad`].
//!
//! The quadratic loss squares each per-component penalty before summing.
//! It is the smooth baseline the original loss is compared against; squaring
//! makes it chase outliers.

use crate::error::{Error, Result};

/// Per-unit shortage cost `cp` and holding cost `ch`, both strictly
/// positive.
///
/// One pair is shared across all products; per-product cost pairs would
/// slot in here if a multi-product study ever needs them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostPair {
    cp: f64,
    ch: f64,
}

impl CostPair {
    pub fn new(cp: f64, ch: f64) -> Result<Self> {
        if !(cp > 0.0 && cp.is_finite()) || !(ch > 0.0 && ch.is_finite()) {
            return Err(Error::invalid(format!(
                "CostPair: cp and ch must be positive and finite, got cp = {cp}, ch = {ch}"
            )));
        }
        Ok(CostPair { cp, ch })
    }

    pub fn cp(&self) -> f64 {
        self.cp
    }

    pub fn ch(&self) -> f64 {
        self.ch
    }

    /// The critical fractile `cp / (cp + ch)`: the demand quantile an
    /// optimal order targets.
    pub fn fractile(&self) -> f64 {
        self.cp / (self.cp + self.ch)
    }
}

/// Which training objective to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    /// Piecewise-linear newsvendor cost (an L1-type loss).
    Original,
    /// Squared per-component penalty (the L2 baseline).
    Quadratic,
}

impl LossKind {
    pub fn name(&self) -> &'static str {
        match self {
            LossKind::Original => "original",
            LossKind::Quadratic => "quadratic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(LossKind::Original),
            "quadratic" => Ok(LossKind::Quadratic),
            other => Err(Error::invalid(format!(
                "unknown loss kind {other:?} (expected \"original\" or \"quadratic\")"
            ))),
        }
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn check_lengths(d: &[f64], y: &[f64], context: &'static str) -> Result<()> {
    if d.len() != y.len() {
        return Err(Error::dims(
            context,
            format!("demand length {}", d.len()),
            format!("order length {}", y.len()),
        ));
    }
    Ok(())
}

/// Original newsvendor cost of ordering `y` against demand `d`, summed
/// over products.
pub fn newsvendor_cost(d: &[f64], y: &[f64], c: &CostPair) -> Result<f64> {
    check_lengths(d, y, "newsvendor_cost")?;
    Ok(d.iter()
        .zip(y)
        .map(|(&dk, &yk)| c.cp * (dk - yk).max(0.0) + c.ch * (yk - dk).max(0.0))
        .sum())
}

/// Quadratic loss: the per-component penalty of [`newsvendor_cost`],
/// squared and summed over products.
pub fn quadratic_cost(d: &[f64], y: &[f64], c: &CostPair) -> Result<f64> {
    check_lengths(d, y, "quadratic_cost")?;
    Ok(d.iter()
        .zip(y)
        .map(|(&dk, &yk)| {
            let penalty = c.cp * (dk - yk).max(0.0) + c.ch * (yk - dk).max(0.0);
            penalty * penalty
        })
        .sum())
}

/// Cost under the chosen [`LossKind`].
pub fn cost(d: &[f64], y: &[f64], c: &CostPair, kind: LossKind) -> Result<f64> {
    match kind {
        LossKind::Original => newsvendor_cost(d, y, c),
        LossKind::Quadratic => quadratic_cost(d, y, c),
    }
}

/// Subgradient of the chosen loss with respect to the order vector `y`.
///
/// For the original loss, component `k` is `-cp` when demand exceeds the
/// order, `+ch` when the order exceeds demand, and `0` at an exact tie.
/// Zero lies in the subdifferential `[-cp, ch]` at the kink, so an exact
/// fit is a stationary point.
pub fn loss_grad(d: &[f64], y: &[f64], c: &CostPair, kind: LossKind) -> Result<Vec<f64>> {
    check_lengths(d, y, "loss_grad")?;
    let grad = d
        .iter()
        .zip(y)
        .map(|(&dk, &yk)| match kind {
            LossKind::Original => {
                if dk > yk {
                    -c.cp
                } else if yk > dk {
                    c.ch
                } else {
                    0.0
                }
            }
            LossKind::Quadratic => {
                if dk > yk {
                    -2.0 * c.cp * c.cp * (dk - yk)
                } else if yk > dk {
                    2.0 * c.ch * c.ch * (yk - dk)
                } else {
                    0.0
                }
            }
        })
        .collect();
    Ok(grad)
}

fn relu(a: f64) -> f64 {
    a.max(0.0)
}

/// The two-ReLU route to the original cost:
/// `Σ_k cp·ReLU(d_k − y_k) + ch·ReLU(y_k − d_k)`.
///
/// Algebraically identical to [`newsvendor_cost`]; it exists so the
/// decomposition that makes the loss trainable can be checked directly.
pub fn cost_via_relu(d: &[f64], y: &[f64], c: &CostPair) -> Result<f64> {
    check_lengths(d, y, "cost_via_relu")?;
    Ok(d.iter()
        .zip(y)
        .map(|(&dk, &yk)| c.cp * relu(dk - yk) + c.ch * relu(yk - dk))
        .sum())
}
