use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{ttn_predict, TtnModel};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::qsim::binomial;
use crate::rng::{child_rng, derive_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotAccuracy {
    pub shots: u64,
    pub mean_accuracy: f64,
    pub trials: usize,
}

/// Mean test accuracy when each prediction uses an `s`-shot estimate of
/// `P(|0⟩)`. Shot counts must be odd so that no estimate equals 0.5.
pub fn shot_accuracy_curve(
    model: &TtnModel,
    test: &LabeledDataset,
    shot_counts: &[u64],
    trials: usize,
    seed: u64,
) -> Result<Vec<ShotAccuracy>> {
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if let Some(&s) = shot_counts.iter().find(|&&s| s % 2 == 0) {
        return Err(Error::invalid(format!("shot count {s} is not odd")));
    }
    let exact: Vec<f64> = test
        .vectors
        .par_iter()
        .map(|x| model.p0(x))
        .collect::<Result<_>>()?;

    shot_counts
        .iter()
        .map(|&s| {
            let per_trial: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = child_rng(derive_seed(seed, s), t as u64);
                    let mut hits = 0usize;
                    for (&p, &y) in exact.iter().zip(&test.labels) {
                        let k = binomial(s, p, &mut rng)?;
                        hits += usize::from(ttn_predict(k as f64 / s as f64) == y);
                    }
                    Ok(hits as f64 / test.len() as f64)
                })
                .collect::<Result<_>>()?;
            Ok(ShotAccuracy {
                shots: s,
                mean_accuracy: per_trial.iter().sum::<f64>() / trials as f64,
                trials,
            })
        })
        .collect()
}
