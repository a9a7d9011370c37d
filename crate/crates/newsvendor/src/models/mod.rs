//! Prediction models mapping features to order quantities.
//!
//! Three model families cover the experiments: a sigmoid [`MlpModel`], the
//! affine [`LinearModel`], and the no-feature classical baselines in
//! [`classical`]. Anything trainable by the optimizer implements
//! [`Trainable`], which exposes a flat parameter vector and per-sample loss
//! gradients.

mod classical;
mod linear;
mod mlp;
mod persist;

pub use classical::{classical_normal_order, empirical_quantile_order};
pub use linear::LinearModel;
pub use mlp::{MlpGradients, MlpModel};
pub use persist::AnyModel;

use crate::error::Result;
use crate::losses::{self, CostPair, LossKind};

/// A model the optimizer can train: a flat parameter vector plus exact
/// per-sample loss gradients with respect to it.
pub trait Trainable: Clone {
    fn param_count(&self) -> usize;

    /// Current parameters, flattened in a fixed documented order.
    fn params(&self) -> Vec<f64>;

    /// Replaces all parameters from a flat vector in [`Trainable::params`]
    /// order.
    fn set_params(&mut self, params: &[f64]) -> Result<()>;

    /// `true` for entries the quadratic regularizer applies to (weights),
    /// `false` for those it skips (biases and intercepts).
    fn weight_mask(&self) -> Vec<bool>;

    /// Predicted order vector for one feature vector.
    fn predict(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Loss of this model's prediction at `x` against demand `d`.
    fn sample_loss(&self, x: &[f64], d: &[f64], c: &CostPair, kind: LossKind) -> Result<f64> {
        losses::cost(d, &self.predict(x)?, c, kind)
    }

    /// Adds the gradient of the per-sample loss into `grad` (length
    /// [`Trainable::param_count`]) and returns the sample loss.
    fn accumulate_loss_grad(
        &self,
        x: &[f64],
        d: &[f64],
        c: &CostPair,
        kind: LossKind,
        grad: &mut [f64],
    ) -> Result<f64>;
}
