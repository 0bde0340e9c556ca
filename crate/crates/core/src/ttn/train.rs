use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{p0_gradient, p0_prepared, theta_count, ttn_predict, TtnModel};
use crate::dataset::LabeledDataset;
use crate::encode::{FeatureVector, RescaleParams};
use crate::error::{Error, Result};
use crate::rng::child_rng;

const SPLIT_STREAM: u64 = 0;
const INIT_STREAM: u64 = 1;
const SHUFFLE_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub train_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            batch_size: 8,
            epochs: 40,
            seed: 0,
            train_fraction: 0.7,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be at least 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::invalid("train_fraction must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Stratified train/test split drawn from this config's seed.
    pub fn split(&self, data: &LabeledDataset) -> Result<(LabeledDataset, LabeledDataset)> {
        self.validate()?;
        data.stratified_split(self.train_fraction, &mut child_rng(self.seed, SPLIT_STREAM))
    }

    pub(crate) fn check_batch(&self, train_len: usize) -> Result<()> {
        self.validate()?;
        if self.batch_size > train_len {
            return Err(Error::invalid(format!(
                "batch_size {} exceeds training set size {train_len}",
                self.batch_size
            )));
        }
        Ok(())
    }

    pub(crate) fn init_thetas(&self, count: usize, stream: u64) -> Vec<f64> {
        let mut rng = child_rng(crate::rng::derive_seed(self.seed, INIT_STREAM), stream);
        (0..count).map(|_| rng.random_range(-PI..=PI)).collect()
    }

    pub(crate) fn shuffle_rng(&self) -> crate::rng::SimRng {
        child_rng(self.seed, SHUFFLE_STREAM)
    }
}

/// Loss values after an epoch (epoch 0 is the initial model).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    /// Training objective; for binary models `Σ(p0 − y)²`.
    pub surrogate_loss: f64,
    /// Misclassification count `Σ(ỹ − y)²` on the training set.
    pub discrete_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome<M> {
    pub model: M,
    pub loss_history: Vec<EpochLoss>,
    /// Angles after every epoch, starting with the initial draw.
    pub theta_trajectory: Vec<Vec<f64>>,
}

pub(crate) fn prepare_all(
    rescaler: &RescaleParams,
    num_features: usize,
    data: &LabeledDataset,
) -> Result<Vec<FeatureVector>> {
    data.vectors
        .iter()
        .map(|v| Ok(rescaler.transform(v)?.padded(num_features)))
        .collect()
}

fn binary_losses(thetas: &[f64], angles: &[FeatureVector], labels: &[usize]) -> Result<(f64, f64)> {
    let ps: Vec<f64> = angles
        .par_iter()
        .map(|a| p0_prepared(thetas, a))
        .collect::<Result<_>>()?;
    let mut surrogate = 0.0;
    let mut discrete = 0.0;
    for (&p, &y) in ps.iter().zip(labels) {
        surrogate += (p - y as f64).powi(2);
        discrete += (ttn_predict(p) as f64 - y as f64).powi(2);
    }
    if !surrogate.is_finite() {
        return Err(Error::Numerical("non-finite training loss".into()));
    }
    Ok((surrogate, discrete))
}

/// Minibatch gradient descent on `Σ(p0(x;θ) − y)²` with parameter-shift
/// gradients, summed over each batch.
pub fn ttn_train(train: &LabeledDataset, config: &TrainConfig) -> Result<TrainOutcome<TtnModel>> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if let Some(&bad) = train.labels.iter().find(|&&y| y > 1) {
        return Err(Error::invalid(format!("non-binary label {bad}")));
    }
    config.check_batch(train.len())?;

    let rescaler = RescaleParams::fit(&train.vectors)?;
    let num_features = rescaler.dim().max(2).next_power_of_two();
    let angles = prepare_all(&rescaler, num_features, train)?;
    let mut thetas = config.init_thetas(theta_count(num_features), 0);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut shuffle = config.shuffle_rng();

    let (s, d) = binary_losses(&thetas, &angles, &train.labels)?;
    let mut loss_history = vec![EpochLoss { epoch: 0, surrogate_loss: s, discrete_loss: d }];
    let mut theta_trajectory = vec![thetas.clone()];

    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle);
        for batch in order.chunks(config.batch_size) {
            let grads: Vec<Vec<f64>> = batch
                .par_iter()
                .map(|&i| {
                    let p = p0_prepared(&thetas, &angles[i])?;
                    let scale = 2.0 * (p - train.labels[i] as f64);
                    let g = p0_gradient(&thetas, &angles[i])?;
                    Ok(g.into_iter().map(|gi| scale * gi).collect())
                })
                .collect::<Result<_>>()?;
            for g in &grads {
                for (t, gi) in thetas.iter_mut().zip(g) {
                    *t -= config.learning_rate * gi;
                }
            }
        }
        let (s, d) = binary_losses(&thetas, &angles, &train.labels)?;
        loss_history.push(EpochLoss { epoch, surrogate_loss: s, discrete_loss: d });
        theta_trajectory.push(thetas.clone());
    }

    Ok(TrainOutcome {
        model: TtnModel::new(rescaler, thetas)?,
        loss_history,
        theta_trajectory,
    })
}

/// Fraction of rows whose exact-mode prediction matches the label.
pub fn accuracy(model: &TtnModel, data: &LabeledDataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    let preds: Vec<usize> = data
        .vectors
        .par_iter()
        .map(|x| model.predict(x))
        .collect::<Result<_>>()?;
    let hits = preds.iter().zip(&data.labels).filter(|(p, y)| p == y).count();
    Ok(hits as f64 / data.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::iris;

    fn pair(a: usize, b: usize) -> LabeledDataset {
        iris().select_classes(&[a, b]).unwrap()
    }

    #[test]
    fn loss_decreases_and_is_deterministic() {
        let cfg = TrainConfig { epochs: 10, seed: 3, ..TrainConfig::default() };
        let (train, _) = cfg.split(&pair(0, 1)).unwrap();
        let a = ttn_train(&train, &cfg).unwrap();
        let b = ttn_train(&train, &cfg).unwrap();
        assert_eq!(a.theta_trajectory, b.theta_trajectory);
        assert_eq!(a.loss_history.len(), 11);
        let first = a.loss_history.first().unwrap().surrogate_loss;
        let last = a.loss_history.last().unwrap().surrogate_loss;
        assert!(last <= first, "{last} > {first}");
    }

    #[test]
    fn split_is_seventy_thirty() {
        let (train, test) = TrainConfig::default().split(&pair(1, 2)).unwrap();
        assert_eq!((train.len(), test.len()), (70, 30));
        assert_eq!(train.labels.iter().filter(|&&y| y == 0).count(), 35);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = TrainConfig::default();
        assert!(ttn_train(&iris(), &cfg).is_err());
        let small = pair(0, 1).subset(&[0, 1, 60]);
        assert!(ttn_train(&small, &cfg).is_err());
        let bad = TrainConfig { learning_rate: 0.0, ..cfg };
        assert!(ttn_train(&pair(0, 1), &bad).is_err());
    }
}
