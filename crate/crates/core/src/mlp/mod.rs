//! Fully connected feed-forward regression network: `tanh` hidden layers,
//! linear output, trained by minibatch gradient descent on mean squared
//! error.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::child_rng;

/// Parameters of one affine layer; `weights` is row-major `out × in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layer_sizes: Vec<usize>,
    pub layers: Vec<Layer>,
}

/// Activations recorded by [`MlpModel::forward_cached`]; `activations[0]`
/// is the input and the last entry the output.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("cache holds at least the input")
    }
}

impl MlpModel {
    /// Glorot-uniform weights in `±√(6/(fan_in+fan_out))`, zero biases.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(Error::invalid("need at least two nonzero layer sizes"));
        }
        let mut rng = child_rng(seed, 0);
        let layers = layer_sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                Layer {
                    weights: (0..fan_in * fan_out).map(|_| rng.random_range(-limit..=limit)).collect(),
                    biases: vec![0.0; fan_out],
                }
            })
            .collect();
        Ok(MlpModel { layer_sizes: layer_sizes.to_vec(), layers })
    }

    /// All-zero parameters.
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        let mut m = MlpModel::new(layer_sizes, 0)?;
        for l in &mut m.layers {
            l.weights.iter_mut().for_each(|w| *w = 0.0);
        }
        Ok(m)
    }

    /// Checks shape chaining and finiteness, e.g. after deserialisation.
    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 2 || self.layers.len() != self.layer_sizes.len() - 1 {
            return Err(Error::invalid("layer count does not match layer_sizes"));
        }
        for (l, w) in self.layers.iter().zip(self.layer_sizes.windows(2)) {
            if l.weights.len() != w[0] * w[1] || l.biases.len() != w[1] {
                return Err(Error::invalid("weight shapes do not chain"));
            }
            if l.weights.iter().chain(&l.biases).any(|v| !v.is_finite()) {
                return Err(Error::Numerical("non-finite parameter".into()));
            }
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_cached(x)?.activations.pop().unwrap())
    }

    pub fn forward_cached(&self, x: &[f64]) -> Result<ForwardCache> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), actual: x.len() });
        }
        let last = self.layers.len() - 1;
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_vec());
        for (i, layer) in self.layers.iter().enumerate() {
            let input = &activations[i];
            let mut out = layer.biases.clone();
            for (o, row) in out.iter_mut().zip(layer.weights.chunks_exact(input.len())) {
                *o += row.iter().zip(input).map(|(w, a)| w * a).sum::<f64>();
                if i < last {
                    *o = o.tanh();
                }
            }
            activations.push(out);
        }
        Ok(ForwardCache { activations })
    }

    /// Backpropagates `∂L/∂output` through a cached forward pass.
    pub fn backward(&self, cache: &ForwardCache, grad_output: &[f64]) -> Result<Gradients> {
        if cache.activations.len() != self.layer_sizes.len()
            || cache.activations.iter().zip(&self.layer_sizes).any(|(a, &n)| a.len() != n)
        {
            return Err(Error::invalid("forward cache does not belong to this model"));
        }
        if grad_output.len() != self.output_dim() {
            return Err(Error::DimensionMismatch { expected: self.output_dim(), actual: grad_output.len() });
        }
        let mut grads = Gradients::zeros_like(self);
        let mut delta = grad_output.to_vec();
        for i in (0..self.layers.len()).rev() {
            let input = &cache.activations[i];
            let g = &mut grads.layers[i];
            for (o, &d) in delta.iter().enumerate() {
                g.biases[o] = d;
                for (gw, &a) in g.weights[o * input.len()..(o + 1) * input.len()].iter_mut().zip(input) {
                    *gw = d * a;
                }
            }
            if i > 0 {
                let w = &self.layers[i].weights;
                delta = (0..input.len())
                    .map(|j| {
                        let s: f64 = delta.iter().enumerate().map(|(o, &d)| d * w[o * input.len() + j]).sum();
                        s * (1.0 - input[j] * input[j])
                    })
                    .collect();
            }
        }
        Ok(grads)
    }

    fn step(&mut self, grads: &Gradients, learning_rate: f64) {
        for (l, g) in self.layers.iter_mut().zip(&grads.layers) {
            l.weights.iter_mut().zip(&g.weights).for_each(|(p, d)| *p -= learning_rate * d);
            l.biases.iter_mut().zip(&g.biases).for_each(|(p, d)| *p -= learning_rate * d);
        }
    }
}

/// Same layout as the model's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            layers: model
                .layers
                .iter()
                .map(|l| Layer { weights: vec![0.0; l.weights.len()], biases: vec![0.0; l.biases.len()] })
                .collect(),
        }
    }

    fn add_scaled(&mut self, other: &Gradients, scale: f64) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weights.iter_mut().zip(&b.weights).for_each(|(x, y)| *x += scale * y);
            a.biases.iter_mut().zip(&b.biases).for_each(|(x, y)| *x += scale * y);
        }
    }

    /// Parameters flattened layer by layer, weights before biases.
    pub fn flatten(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(&l.biases).copied()).collect()
    }
}

fn check_pairs(model: &MlpModel, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch { expected: inputs.len(), actual: targets.len() });
    }
    if let Some(t) = targets.iter().find(|t| t.len() != model.output_dim()) {
        return Err(Error::DimensionMismatch { expected: model.output_dim(), actual: t.len() });
    }
    Ok(())
}

/// Mean over samples and outputs of the squared error.
pub fn mse(model: &MlpModel, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
    check_pairs(model, inputs, targets)?;
    let mut total = 0.0;
    for (x, y) in inputs.iter().zip(targets) {
        let out = model.forward(x)?;
        total += out.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    }
    Ok(total / (inputs.len() * model.output_dim()) as f64)
}

/// Gradient of [`mse`] over the given rows.
pub fn mse_gradient(model: &MlpModel, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<Gradients> {
    check_pairs(model, inputs, targets)?;
    let scale = 2.0 / (inputs.len() * model.output_dim()) as f64;
    let mut total = Gradients::zeros_like(model);
    for (x, y) in inputs.iter().zip(targets) {
        let cache = model.forward_cached(x)?;
        let g_out: Vec<f64> = cache.output().iter().zip(y).map(|(a, b)| scale * (a - b)).collect();
        total.add_scaled(&model.backward(&cache, &g_out)?, 1.0);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpTrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MlpTrainConfig {
    fn default() -> Self {
        MlpTrainConfig { learning_rate: 1e-2, batch_size: 32, epochs: 100, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpTrainOutcome {
    pub model: MlpModel,
    /// Full-dataset MSE before training and after each epoch.
    pub loss_history: Vec<f64>,
}

/// Plain minibatch gradient descent with a fixed learning rate.
pub fn train(
    mut model: MlpModel,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    config: &MlpTrainConfig,
) -> Result<MlpTrainOutcome> {
    check_pairs(&model, inputs, targets)?;
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) || config.batch_size == 0 {
        return Err(Error::invalid("learning_rate must be positive and batch_size nonzero"));
    }
    let mut rng = child_rng(config.seed, 1);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut loss_history = vec![mse(&model, inputs, targets)?];
    let mut xs = Vec::with_capacity(config.batch_size);
    let mut ys = Vec::with_capacity(config.batch_size);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            xs.clear();
            ys.clear();
            xs.extend(batch.iter().map(|&i| inputs[i].clone()));
            ys.extend(batch.iter().map(|&i| targets[i].clone()));
            let g = mse_gradient(&model, &xs, &ys)?;
            model.step(&g, config.learning_rate);
        }
        let loss = mse(&model, inputs, targets)?;
        if !loss.is_finite() {
            return Err(Error::Numerical(format!(
                "training loss became non-finite at epoch {epoch} (learning_rate {})",
                config.learning_rate
            )));
        }
        loss_history.push(loss);
    }
    Ok(MlpTrainOutcome { model, loss_history })
}
