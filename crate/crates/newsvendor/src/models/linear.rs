//! Affine model: order = intercept + weights · features.

use crate::error::{Error, Result};
use crate::losses::{self, CostPair, LossKind};
use crate::models::Trainable;

/// Linear prediction model for a single product.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    intercept: f64,
    weights: Vec<f64>,
}

impl LinearModel {
    pub fn new(intercept: f64, weights: Vec<f64>) -> Self {
        LinearModel { intercept, weights }
    }

    pub fn zeros(n_features: usize) -> Self {
        LinearModel {
            intercept: 0.0,
            weights: vec![0.0; n_features],
        }
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    /// `q0 + q · x`.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::dims(
                "linear_forward",
                format!("{} features", self.weights.len()),
                format!("{} features", x.len()),
            ));
        }
        Ok(self.intercept + crate::matrix::dot(&self.weights, x))
    }
}

impl Trainable for LinearModel {
    fn param_count(&self) -> usize {
        1 + self.weights.len()
    }

    /// Layout: `[intercept, weights...]`.
    fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.param_count());
        p.push(self.intercept);
        p.extend_from_slice(&self.weights);
        p
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::dims(
                "LinearModel::set_params",
                self.param_count(),
                params.len(),
            ));
        }
        self.intercept = params[0];
        self.weights.copy_from_slice(&params[1..]);
        Ok(())
    }

    fn weight_mask(&self) -> Vec<bool> {
        let mut mask = vec![true; self.param_count()];
        mask[0] = false; // the intercept is not regularized
        mask
    }

    fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![self.forward(x)?])
    }

    fn accumulate_loss_grad(
        &self,
        x: &[f64],
        d: &[f64],
        c: &CostPair,
        kind: LossKind,
        grad: &mut [f64],
    ) -> Result<f64> {
        if d.len() != 1 {
            return Err(Error::dims(
                "LinearModel loss gradient",
                "single-product demand (length 1)",
                format!("length {}", d.len()),
            ));
        }
        let pred = vec![self.forward(x)?];
        let loss = losses::cost(d, &pred, c, kind)?;
        let g = losses::loss_grad(d, &pred, c, kind)?[0];
        grad[0] += g;
        for (gj, &xj) in grad[1..].iter_mut().zip(x) {
            *gj += g * xj;
        }
        Ok(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intercept_only() {
        let m = LinearModel::new(7.0, vec![0.0, 0.0]);
        assert_eq!(m.forward(&[3.0, -5.0]).unwrap(), 7.0);
    }

    #[test]
    fn direct_evaluation() {
        let m = LinearModel::new(1.0, vec![2.0, 3.0]);
        assert_eq!(m.forward(&[1.0, 1.0]).unwrap(), 6.0);
    }

    #[test]
    fn zero_features_return_the_intercept() {
        let m = LinearModel::new(4.5, vec![2.0, 3.0]);
        assert_eq!(m.forward(&[0.0, 0.0]).unwrap(), 4.5);
    }

    #[test]
    fn rejects_wrong_feature_count() {
        let m = LinearModel::new(0.0, vec![1.0]);
        assert!(m.forward(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let c = CostPair::new(2.0, 1.5).unwrap();
        let m = LinearModel::new(0.5, vec![1.0, -2.0]);
        let x = [0.7, 0.3];
        let d = [5.0];
        for kind in [LossKind::Original, LossKind::Quadratic] {
            let mut grad = vec![0.0; 3];
            m.accumulate_loss_grad(&x, &d, &c, kind, &mut grad).unwrap();
            let h = 1e-6;
            let p0 = m.params();
            for i in 0..3 {
                let mut up = m.clone();
                let mut down = m.clone();
                let mut p = p0.clone();
                p[i] += h;
                up.set_params(&p).unwrap();
                p[i] -= 2.0 * h;
                down.set_params(&p).unwrap();
                let fd = (up.sample_loss(&x, &d, &c, kind).unwrap()
                    - down.sample_loss(&x, &d, &c, kind).unwrap())
                    / (2.0 * h);
                assert!((grad[i] - fd).abs() < 1e-6, "{kind} param {i}");
            }
        }
    }
}
