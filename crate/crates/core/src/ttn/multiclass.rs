use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{p0_gradient, p0_prepared, theta_count, TtnModel};
use super::train::{prepare_all, EpochLoss, TrainConfig, TrainOutcome};
use crate::dataset::LabeledDataset;
use crate::encode::{FeatureVector, RescaleParams};
use crate::error::{Error, Result};
use crate::qcluster::ConfusionMatrix;

/// One independent tree per class over the same encoded features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassTtnModel {
    pub class_count: usize,
    pub branches: Vec<TtnModel>,
}

impl MulticlassTtnModel {
    pub fn new(rescaler: RescaleParams, branch_thetas: Vec<Vec<f64>>) -> Result<Self> {
        if branch_thetas.len() < 2 {
            return Err(Error::invalid("multiclass model needs at least 2 branches"));
        }
        let branches = branch_thetas
            .into_iter()
            .map(|t| TtnModel::new(rescaler.clone(), t))
            .collect::<Result<Vec<_>>>()?;
        Ok(MulticlassTtnModel { class_count: branches.len(), branches })
    }

    pub fn validate(&self) -> Result<()> {
        if self.branches.len() != self.class_count || self.class_count < 2 {
            return Err(Error::invalid("branch count does not match class_count"));
        }
        for b in &self.branches {
            b.validate()?;
            if b.rescaler != self.branches[0].rescaler {
                return Err(Error::invalid("branches must share one rescaler"));
            }
        }
        Ok(())
    }

    /// Exact `P(|0⟩)` of every branch.
    pub fn probabilities(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        let angles = self.branches[0].prepare(x)?;
        self.branches
            .iter()
            .map(|b| p0_prepared(&b.thetas, &angles))
            .collect()
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<usize> {
        Ok(argmax(&self.probabilities(x)?))
    }

    pub fn confusion(&self, data: &LabeledDataset) -> Result<ConfusionMatrix> {
        let preds: Vec<usize> = data
            .vectors
            .par_iter()
            .map(|x| self.predict(x))
            .collect::<Result<_>>()?;
        ConfusionMatrix::from_labels(&data.labels, &preds, self.class_count)
    }
}

/// Index of the largest value; ties go to the smallest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn softmax(values: &[f64]) -> Vec<f64> {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = values.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

fn branch_ps(branches: &[Vec<f64>], angles: &FeatureVector) -> Result<Vec<f64>> {
    branches.iter().map(|t| p0_prepared(t, angles)).collect()
}

fn losses(branches: &[Vec<f64>], angles: &[FeatureVector], labels: &[usize]) -> Result<(f64, f64)> {
    let per_row: Vec<(f64, f64)> = angles
        .par_iter()
        .zip(labels)
        .map(|(a, &y)| {
            let ps = branch_ps(branches, a)?;
            let q = softmax(&ps);
            Ok((-q[y].ln(), f64::from(u8::from(argmax(&ps) != y))))
        })
        .collect::<Result<_>>()?;
    let ce: f64 = per_row.iter().map(|r| r.0).sum();
    if !ce.is_finite() {
        return Err(Error::Numerical("non-finite training loss".into()));
    }
    Ok((ce, per_row.iter().map(|r| r.1).sum()))
}

/// Trains all branches jointly on the cross-entropy of the softmax over
/// branch probabilities. `discrete_loss` counts argmax errors.
pub fn multiclass_train(train: &LabeledDataset, config: &TrainConfig) -> Result<TrainOutcome<MulticlassTtnModel>> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if train.class_count < 2 {
        return Err(Error::invalid("class_count must be at least 2"));
    }
    config.check_batch(train.len())?;

    let rescaler = RescaleParams::fit(&train.vectors)?;
    let num_features = rescaler.dim().max(2).next_power_of_two();
    let angles = prepare_all(&rescaler, num_features, train)?;
    let mut branches: Vec<Vec<f64>> = (0..train.class_count)
        .map(|c| config.init_thetas(theta_count(num_features), c as u64))
        .collect();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut shuffle = config.shuffle_rng();

    let (s, d) = losses(&branches, &angles, &train.labels)?;
    let mut loss_history = vec![EpochLoss { epoch: 0, surrogate_loss: s, discrete_loss: d }];
    let mut theta_trajectory = vec![branches.concat()];

    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle);
        for batch in order.chunks(config.batch_size) {
            let grads: Vec<Vec<Vec<f64>>> = batch
                .par_iter()
                .map(|&i| {
                    let ps = branch_ps(&branches, &angles[i])?;
                    let q = softmax(&ps);
                    branches
                        .iter()
                        .enumerate()
                        .map(|(c, t)| {
                            let dl_dp = q[c] - f64::from(u8::from(c == train.labels[i]));
                            let g = p0_gradient(t, &angles[i])?;
                            Ok(g.into_iter().map(|gi| dl_dp * gi).collect())
                        })
                        .collect::<Result<Vec<Vec<f64>>>>()
                })
                .collect::<Result<_>>()?;
            for g in &grads {
                for (t, gc) in branches.iter_mut().zip(g) {
                    for (ti, gi) in t.iter_mut().zip(gc) {
                        *ti -= config.learning_rate * gi;
                    }
                }
            }
        }
        let (s, d) = losses(&branches, &angles, &train.labels)?;
        loss_history.push(EpochLoss { epoch, surrogate_loss: s, discrete_loss: d });
        theta_trajectory.push(branches.concat());
    }

    Ok(TrainOutcome {
        model: MulticlassTtnModel::new(rescaler, branches)?,
        loss_history,
        theta_trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_picks_largest_then_smallest_index() {
        assert_eq!(argmax(&[0.9, 0.2, 0.3]), 0);
        assert_eq!(argmax(&[0.2, 0.7, 0.7]), 1);
    }

    #[test]
    fn softmax_sums_to_one() {
        let q = softmax(&[0.1, 0.5, 0.9]);
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(q[2] > q[1] && q[1] > q[0]);
    }
}
