//! Training loop: regularized objective assembly and the optimizers.
//!
//! The objective is the mean per-sample loss over the dataset plus
//! `λ · Σ w²` over weights (biases and intercepts excluded). Averaging over
//! samples keeps `λ` and step sizes independent of dataset size. Training
//! is full batch: datasets here are at most a few thousand rows.

mod lbfgs;

pub use lbfgs::{
    lbfgs_direction, minimize_lbfgs, CurvaturePair, LbfgsOptions, Minimization, Objective,
    StopReason, ARMIJO_C1,
};

use std::io::Write;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::losses::{CostPair, LossKind};
use crate::models::Trainable;

/// Which optimizer drives the training loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    /// L-BFGS with backtracking Armijo line search (the default).
    Lbfgs,
    /// Plain gradient descent with momentum at a fixed learning rate.
    MomentumGd,
}

/// Training hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Weight-decay strength for the quadratic regularizer.
    pub lambda: f64,
    pub max_iters: usize,
    /// Stop when the objective gradient's infinity-norm drops below this.
    pub tolerance: f64,
    pub lbfgs_memory: usize,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    /// Momentum-GD step size; ignored by L-BFGS.
    pub learning_rate: f64,
    /// Momentum-GD momentum coefficient; ignored by L-BFGS.
    pub momentum: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 1e-3,
            max_iters: 2000,
            tolerance: 1e-6,
            lbfgs_memory: 10,
            seed: 0,
            optimizer: OptimizerKind::Lbfgs,
            learning_rate: 0.01,
            momentum: 0.9,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::invalid(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::invalid("max_iters must be >= 1".to_string()));
        }
        if self.lbfgs_memory < 1 {
            return Err(Error::invalid("lbfgs_memory must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Outcome of a training run.
#[derive(Debug, Clone)]
pub struct TrainReport<M> {
    pub model: M,
    /// Objective value after each completed iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
}

/// Quadratic weight penalty `λ · Σ params²` over the masked (weight)
/// entries, with its gradient `2λ·w`.
pub fn regularizer(params: &[f64], weight_mask: &[bool], lambda: f64) -> Result<(f64, Vec<f64>)> {
    if lambda < 0.0 {
        return Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    if params.len() != weight_mask.len() {
        return Err(Error::dims("regularizer", weight_mask.len(), params.len()));
    }
    let mut value = 0.0;
    let mut grad = vec![0.0; params.len()];
    for (i, (&p, &m)) in params.iter().zip(weight_mask).enumerate() {
        if m {
            value += lambda * p * p;
            grad[i] = 2.0 * lambda * p;
        }
    }
    Ok((value, grad))
}

struct DataObjective<'a, M: Trainable> {
    template: &'a M,
    data: &'a Dataset,
    costs: &'a CostPair,
    kind: LossKind,
    lambda: f64,
    mask: Vec<bool>,
}

impl<M: Trainable> DataObjective<'_, M> {
    fn instantiate(&self, params: &[f64]) -> Result<M> {
        let mut model = self.template.clone();
        model.set_params(params)?;
        Ok(model)
    }
}

impl<M: Trainable> Objective for DataObjective<'_, M> {
    fn value(&self, params: &[f64]) -> Result<f64> {
        let model = self.instantiate(params)?;
        let mut total = 0.0;
        for i in 0..self.data.len() {
            total += model.sample_loss(
                self.data.feature_row(i),
                self.data.demand_row(i),
                self.costs,
                self.kind,
            )?;
        }
        let (penalty, _) = regularizer(params, &self.mask, self.lambda)?;
        Ok(total / self.data.len() as f64 + penalty)
    }

    fn value_grad(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        let model = self.instantiate(params)?;
        let n = self.data.len() as f64;
        let mut grad = vec![0.0; params.len()];
        let mut total = 0.0;
        for i in 0..self.data.len() {
            total += model.accumulate_loss_grad(
                self.data.feature_row(i),
                self.data.demand_row(i),
                self.costs,
                self.kind,
                &mut grad,
            )?;
        }
        for g in grad.iter_mut() {
            *g /= n;
        }
        let (penalty, pgrad) = regularizer(params, &self.mask, self.lambda)?;
        for (g, pg) in grad.iter_mut().zip(&pgrad) {
            *g += pg;
        }
        Ok((total / n + penalty, grad))
    }
}

/// Trains `model` on `data`, minimizing mean per-sample loss plus the
/// weight regularizer. Deterministic given the model and config.
pub fn train<M: Trainable>(
    model: &M,
    data: &Dataset,
    costs: &CostPair,
    kind: LossKind,
    cfg: &TrainConfig,
) -> Result<TrainReport<M>> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset("train"));
    }
    let objective = DataObjective {
        template: model,
        data,
        costs,
        kind,
        lambda: cfg.lambda,
        mask: model.weight_mask(),
    };
    let x0 = model.params();

    let run = match cfg.optimizer {
        OptimizerKind::Lbfgs => minimize_lbfgs(
            &objective,
            &x0,
            &LbfgsOptions {
                max_iters: cfg.max_iters,
                tolerance: cfg.tolerance,
                memory: cfg.lbfgs_memory,
            },
        )?,
        OptimizerKind::MomentumGd => minimize_momentum(&objective, &x0, cfg)?,
    };

    let mut trained = model.clone();
    trained.set_params(&run.x)?;
    Ok(TrainReport {
        model: trained,
        iterations: run.trace.len(),
        trace: run.trace,
        stop: run.stop,
    })
}

/// Fixed-step momentum descent. The returned point is the best one seen,
/// since a fixed step cannot guarantee monotone decrease.
fn minimize_momentum<O: Objective>(obj: &O, x0: &[f64], cfg: &TrainConfig) -> Result<Minimization> {
    let mut x = x0.to_vec();
    let (mut f, mut g) = obj.value_grad(&x)?;
    if !f.is_finite() {
        return Err(Error::NonFiniteLoss { iteration: 0 });
    }
    let mut velocity = vec![0.0; x.len()];
    let mut best_x = x.clone();
    let mut best_f = f;
    let mut trace = Vec::new();
    let mut stop = StopReason::MaxIterations;

    for iter in 1..=cfg.max_iters {
        if lbfgs::inf_norm(&g) < cfg.tolerance {
            stop = StopReason::GradientTolerance;
            break;
        }
        for ((v, xi), gi) in velocity.iter_mut().zip(x.iter_mut()).zip(&g) {
            *v = cfg.momentum * *v - cfg.learning_rate * gi;
            *xi += *v;
        }
        let (fi, gi) = obj.value_grad(&x)?;
        if !fi.is_finite() {
            return Err(Error::NonFiniteLoss { iteration: iter });
        }
        f = fi;
        g = gi;
        trace.push(f);
        if f < best_f {
            best_f = f;
            best_x = x.clone();
        }
    }

    Ok(Minimization {
        x: best_x,
        trace,
        stop,
    })
}

/// Writes a loss trace as `iteration,objective` CSV rows.
pub fn write_trace_csv(trace: &[f64], w: &mut impl Write) -> Result<()> {
    writeln!(w, "iteration,objective")?;
    for (i, v) in trace.iter().enumerate() {
        writeln!(w, "{},{v}", i + 1)?;
    }
    Ok(())
}
