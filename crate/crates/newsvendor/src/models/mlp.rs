//! Feed-forward network with sigmoid hidden layers and an identity output.
//!
//! The output layer is affine so order quantities are unbounded; a sigmoid
//! output could never leave (0, 1). Demand scaling is folded into the
//! forward pass: the network's raw output is divided by `demand_scale`, so
//! training effectively fits targets `d · demand_scale` while predictions
//! stay in demand units.

use crate::error::{Error, Result};
use crate::losses::{self, CostPair, LossKind};
use crate::matrix::Matrix;
use crate::models::Trainable;
use crate::rng::SeededRng;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Multilayer perceptron. Layer sizes run `[n_in, h1, ..., m_out]` with at
/// least one hidden layer; two hidden layers is the usual configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layer_sizes: Vec<usize>,
    /// `weights[l]` has shape `(layer_sizes[l+1], layer_sizes[l])`.
    weights: Vec<Matrix>,
    biases: Vec<Vec<f64>>,
    demand_scale: f64,
}

/// Gradients with the same shapes as the model's weights and biases.
#[derive(Debug, Clone)]
pub struct MlpGradients {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

fn validate_sizes(layer_sizes: &[usize], demand_scale: f64) -> Result<()> {
    if layer_sizes.len() < 3 {
        return Err(Error::invalid(format!(
            "MlpModel needs at least one hidden layer, got sizes {layer_sizes:?}"
        )));
    }
    if layer_sizes.contains(&0) {
        return Err(Error::invalid(format!(
            "MlpModel layer sizes must be positive, got {layer_sizes:?}"
        )));
    }
    if !(demand_scale > 0.0 && demand_scale.is_finite()) {
        return Err(Error::invalid(format!(
            "demand_scale must be positive, got {demand_scale}"
        )));
    }
    Ok(())
}

impl MlpModel {
    /// Seeded initialization: weights uniform in
    /// `±√(6 / (fan_in + fan_out))`, biases zero.
    pub fn init(layer_sizes: &[usize], demand_scale: f64, seed: u64) -> Result<Self> {
        validate_sizes(layer_sizes, demand_scale)?;
        let mut rng = SeededRng::new(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for w in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let data: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| rng.uniform(-bound, bound))
                .collect();
            weights.push(Matrix::new(fan_out, fan_in, data)?);
            biases.push(vec![0.0; fan_out]);
        }
        Ok(MlpModel {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            demand_scale,
        })
    }

    /// All-zero parameters; useful as a fixed point in tests.
    pub fn zeros(layer_sizes: &[usize], demand_scale: f64) -> Result<Self> {
        validate_sizes(layer_sizes, demand_scale)?;
        let weights = layer_sizes
            .windows(2)
            .map(|w| Matrix::zeros(w[1], w[0]))
            .collect();
        let biases = layer_sizes.windows(2).map(|w| vec![0.0; w[1]]).collect();
        Ok(MlpModel {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            demand_scale,
        })
    }

    /// Assembles a model from explicit layer parameters, checking that
    /// consecutive shapes agree.
    pub fn from_parts(
        weights: Vec<Matrix>,
        biases: Vec<Vec<f64>>,
        demand_scale: f64,
    ) -> Result<Self> {
        if weights.is_empty() || weights.len() != biases.len() {
            return Err(Error::invalid(
                "MlpModel::from_parts: need equal, nonzero numbers of weight matrices and bias vectors".to_string(),
            ));
        }
        let mut layer_sizes = vec![weights[0].cols()];
        for (l, (w, b)) in weights.iter().zip(&biases).enumerate() {
            if w.cols() != layer_sizes[l] {
                return Err(Error::dims(
                    "MlpModel::from_parts",
                    format!("layer {l} input {}", layer_sizes[l]),
                    format!("{} columns", w.cols()),
                ));
            }
            if b.len() != w.rows() {
                return Err(Error::dims(
                    "MlpModel::from_parts",
                    format!("layer {l} bias length {}", w.rows()),
                    b.len(),
                ));
            }
            layer_sizes.push(w.rows());
        }
        validate_sizes(&layer_sizes, demand_scale)?;
        Ok(MlpModel {
            layer_sizes,
            weights,
            biases,
            demand_scale,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn demand_scale(&self) -> f64 {
        self.demand_scale
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    /// Forward pass: hidden layers are sigmoid; the output layer is affine
    /// and divided by `demand_scale` to return orders in demand units.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_cached(x)?.1)
    }

    /// Forward pass keeping every layer activation, for backpropagation.
    /// Returns `(activations per layer including the input, prediction)`.
    fn forward_cached(&self, x: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        if x.len() != self.input_dim() {
            return Err(Error::dims(
                "mlp_forward",
                format!("{} features", self.input_dim()),
                format!("{} features", x.len()),
            ));
        }
        let n_layers = self.weights.len();
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
        acts.push(x.to_vec());
        for l in 0..n_layers - 1 {
            let mut z = self.weights[l].mat_vec(&acts[l])?;
            for (zk, bk) in z.iter_mut().zip(&self.biases[l]) {
                *zk = sigmoid(*zk + bk);
            }
            acts.push(z);
        }
        let mut raw = self.weights[n_layers - 1].mat_vec(&acts[n_layers - 1])?;
        for (rk, bk) in raw.iter_mut().zip(&self.biases[n_layers - 1]) {
            *rk = (*rk + bk) / self.demand_scale;
        }
        Ok((acts, raw))
    }

    /// Reverse-mode gradients of the chosen loss at `(x, d)` with respect
    /// to every weight and bias.
    pub fn backward(
        &self,
        x: &[f64],
        d: &[f64],
        c: &CostPair,
        kind: LossKind,
    ) -> Result<MlpGradients> {
        Ok(self.backward_with_loss(x, d, c, kind)?.1)
    }

    fn backward_with_loss(
        &self,
        x: &[f64],
        d: &[f64],
        c: &CostPair,
        kind: LossKind,
    ) -> Result<(f64, MlpGradients)> {
        let (acts, pred) = self.forward_cached(x)?;
        let loss = losses::cost(d, &pred, c, kind)?;
        let n_layers = self.weights.len();

        let mut grads = MlpGradients {
            weights: self
                .weights
                .iter()
                .map(|w| Matrix::zeros(w.rows(), w.cols()))
                .collect(),
            biases: self.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        };

        // Loss subgradient chained through the 1/demand_scale output map.
        let mut delta: Vec<f64> = losses::loss_grad(d, &pred, c, kind)?
            .into_iter()
            .map(|g| g / self.demand_scale)
            .collect();

        for l in (0..n_layers).rev() {
            grads.weights[l].add_outer(&delta, &acts[l]);
            grads.biases[l].copy_from_slice(&delta);
            if l == 0 {
                break;
            }
            let back = self.weights[l].tr_mat_vec(&delta)?;
            // acts[l] is the sigmoid output of layer l-1: σ' = a(1-a).
            delta = back
                .iter()
                .zip(&acts[l])
                .map(|(&bk, &ak)| bk * ak * (1.0 - ak))
                .collect();
        }
        Ok((loss, grads))
    }
}

impl Trainable for MlpModel {
    fn param_count(&self) -> usize {
        self.weights
            .iter()
            .map(|w| w.rows() * w.cols() + w.rows())
            .sum()
    }

    fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w.as_slice());
            out.extend_from_slice(b);
        }
        out
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::dims(
                "MlpModel::set_params",
                self.param_count(),
                params.len(),
            ));
        }
        let mut offset = 0;
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            let wn = w.rows() * w.cols();
            w.as_mut_slice()
                .copy_from_slice(&params[offset..offset + wn]);
            offset += wn;
            let bn = b.len();
            b.copy_from_slice(&params[offset..offset + bn]);
            offset += bn;
        }
        Ok(())
    }

    fn weight_mask(&self) -> Vec<bool> {
        let mut mask = Vec::with_capacity(self.param_count());
        for w in &self.weights {
            mask.extend(std::iter::repeat_n(true, w.rows() * w.cols()));
            mask.extend(std::iter::repeat_n(false, w.rows()));
        }
        mask
    }

    fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.forward(x)
    }

    fn accumulate_loss_grad(
        &self,
        x: &[f64],
        d: &[f64],
        c: &CostPair,
        kind: LossKind,
        grad: &mut [f64],
    ) -> Result<f64> {
        let (loss, g) = self.backward_with_loss(x, d, c, kind)?;
        let mut offset = 0;
        for (w, b) in g.weights.iter().zip(&g.biases) {
            for &v in w.as_slice() {
                grad[offset] += v;
                offset += 1;
            }
            for &v in b {
                grad[offset] += v;
                offset += 1;
            }
        }
        Ok(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn costs(cp: f64, ch: f64) -> CostPair {
        CostPair::new(cp, ch).unwrap()
    }

    #[test]
    fn zero_network_outputs_zero() {
        let model = MlpModel::zeros(&[3, 4, 4, 1], 1.0).unwrap();
        assert_eq!(model.forward(&[1.0, -2.0, 0.5]).unwrap(), vec![0.0]);
    }

    #[test]
    fn unit_chain_composes_sigmoids() {
        // 1-1-1-1 net, all weights 1, biases 0: output = σ(σ(0)) = σ(0.5).
        let mut model = MlpModel::zeros(&[1, 1, 1, 1], 1.0).unwrap();
        let ones = vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        model.set_params(&ones).unwrap();
        let out = model.forward(&[0.0]).unwrap();
        assert!((out[0] - 0.622_459_331_201_854_6).abs() < 1e-12, "{out:?}");
    }

    #[test]
    fn doubling_demand_scale_halves_outputs() {
        let a = MlpModel::init(&[3, 5, 5, 2], 1.0, 11).unwrap();
        let mut b = a.clone();
        b.demand_scale = 2.0;
        let x = [0.3, -1.0, 2.0];
        let ya = a.forward(&x).unwrap();
        let yb = b.forward(&x).unwrap();
        for (p, q) in ya.iter().zip(&yb) {
            assert!((p / 2.0 - q).abs() < 1e-15);
        }
    }

    #[test]
    fn forward_rejects_wrong_input_length() {
        let model = MlpModel::zeros(&[3, 4, 4, 1], 1.0).unwrap();
        assert!(model.forward(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn outputs_stay_finite_for_extreme_inputs() {
        let model = MlpModel::init(&[3, 8, 8, 1], 1.0 / 66.0, 5).unwrap();
        for x in [[1e8, -1e8, 1e8], [-1e300, 1e300, 0.0]] {
            let out = model.forward(&x).unwrap();
            assert!(out.iter().all(|v| v.is_finite()), "{out:?}");
        }
    }

    #[test]
    fn gradients_vanish_at_an_exact_fit() {
        let model = MlpModel::zeros(&[2, 3, 3, 1], 1.0).unwrap();
        // Zero network predicts 0; demand 0 ties exactly.
        for kind in [LossKind::Original, LossKind::Quadratic] {
            let g = model
                .backward(&[1.0, 2.0], &[0.0], &costs(2.0, 1.5), kind)
                .unwrap();
            assert!(g
                .weights
                .iter()
                .all(|w| w.as_slice().iter().all(|&v| v == 0.0)));
            assert!(g.biases.iter().all(|b| b.iter().all(|&v| v == 0.0)));
        }
    }

    #[test]
    fn backward_matches_central_differences() {
        let c = costs(2.0, 1.5);
        for seed in 0..10u64 {
            let model = MlpModel::init(&[3, 4, 4, 1], 0.5, seed).unwrap();
            let mut rng = SeededRng::new(seed + 1000);
            let x: Vec<f64> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
            // Put the demand a safe distance from the prediction kink.
            let pred = model.forward(&x).unwrap();
            let d = vec![pred[0] + if seed % 2 == 0 { 3.0 } else { -3.0 }];

            for kind in [LossKind::Original, LossKind::Quadratic] {
                let mut grad = vec![0.0; model.param_count()];
                model
                    .accumulate_loss_grad(&x, &d, &c, kind, &mut grad)
                    .unwrap();

                let params = model.params();
                let h = 1e-5;
                for i in 0..params.len() {
                    let mut up = model.clone();
                    let mut down = model.clone();
                    let mut p = params.clone();
                    p[i] += h;
                    up.set_params(&p).unwrap();
                    p[i] -= 2.0 * h;
                    down.set_params(&p).unwrap();
                    let fd = (up.sample_loss(&x, &d, &c, kind).unwrap()
                        - down.sample_loss(&x, &d, &c, kind).unwrap())
                        / (2.0 * h);
                    let scale = fd.abs().max(1e-6);
                    assert!(
                        (grad[i] - fd).abs() / scale < 1e-5,
                        "seed {seed} kind {kind} param {i}: {} vs {fd}",
                        grad[i]
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_gradient_scales_linearly_with_the_gap() {
        let c = costs(2.0, 1.5);
        let model = MlpModel::zeros(&[2, 3, 3, 1], 1.0).unwrap();
        let x = [0.5, -0.5];
        let mut g1 = vec![0.0; model.param_count()];
        let mut g3 = vec![0.0; model.param_count()];
        model
            .accumulate_loss_grad(&x, &[2.0], &c, LossKind::Quadratic, &mut g1)
            .unwrap();
        model
            .accumulate_loss_grad(&x, &[6.0], &c, LossKind::Quadratic, &mut g3)
            .unwrap();
        // Prediction is 0, so tripling d triples the gap and the gradient
        // scales by 3 (per-component grad is linear in the gap).
        for (a, b) in g1.iter().zip(&g3) {
            assert!((3.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn params_round_trip() {
        let model = MlpModel::init(&[3, 10, 10, 1], 1.0 / 66.0, 42).unwrap();
        let p = model.params();
        assert_eq!(p.len(), model.param_count());
        let mut copy = MlpModel::zeros(&[3, 10, 10, 1], 1.0 / 66.0).unwrap();
        copy.set_params(&p).unwrap();
        assert_eq!(copy.params(), p);
        let mask = model.weight_mask();
        assert_eq!(mask.len(), p.len());
        assert_eq!(mask.iter().filter(|&&m| m).count(), 3 * 10 + 10 * 10 + 10);
    }
}
