use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConfusionMatrix, QuantumSettings};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::child_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnOutcome {
    pub predictions: Vec<usize>,
    pub confusion: ConfusionMatrix,
}

/// Majority label among `neighbours`; ties go to the smallest class id.
fn vote(neighbours: &[usize], train: &LabeledDataset) -> usize {
    let mut tally = vec![0usize; train.class_count];
    for &i in neighbours {
        tally[train.labels[i]] += 1;
    }
    let mut best = 0;
    for (c, &n) in tally.iter().enumerate() {
        if n > tally[best] {
            best = c;
        }
    }
    best
}

fn check_inputs(train: &LabeledDataset, test: &LabeledDataset, k: usize) -> Result<()> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    if k == 0 || k > train.len() {
        return Err(Error::invalid(format!(
            "k = {k} must lie in 1..={}",
            train.len()
        )));
    }
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            actual: test.dim(),
        });
    }
    Ok(())
}

fn outcome(test: &LabeledDataset, train: &LabeledDataset, predictions: Vec<usize>) -> Result<KnnOutcome> {
    let classes = train.class_count.max(test.class_count);
    let confusion = ConfusionMatrix::from_labels(&test.labels, &predictions, classes)?;
    Ok(KnnOutcome {
        predictions,
        confusion,
    })
}

/// Classical KNN on exact squared Euclidean distances. Distance ties go to
/// the smaller training index.
pub fn knn_classify(train: &LabeledDataset, test: &LabeledDataset, k: usize) -> Result<KnnOutcome> {
    check_inputs(train, test, k)?;
    let predictions = test
        .vectors
        .iter()
        .map(|x| {
            let mut order: Vec<(f64, usize)> = train
                .vectors
                .iter()
                .enumerate()
                .map(|(i, t)| (x.squared_distance(t), i))
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let neighbours: Vec<usize> = order[..k].iter().map(|&(_, i)| i).collect();
            vote(&neighbours, train)
        })
        .collect();
    outcome(test, train, predictions)
}

/// Quantum KNN: SWAP-test distances to every training vector, then `k`
/// successive minimum searches, each excluding the neighbours already
/// chosen, then a majority vote.
///
/// Test row `i` draws from child stream `i` of `seed`, so results do not
/// depend on the thread pool.
pub fn qknn_classify(
    train: &LabeledDataset,
    test: &LabeledDataset,
    k: usize,
    settings: &QuantumSettings,
    seed: u64,
) -> Result<KnnOutcome> {
    check_inputs(train, test, k)?;
    let predictions = test
        .vectors
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut rng = child_rng(seed, i as u64);
            let table = settings.distances(x, &train.vectors, &mut rng)?;
            let mut chosen = Vec::with_capacity(k);
            for _ in 0..k {
                let j = settings.select(&table, &chosen, &mut rng)?;
                chosen.push(j);
            }
            Ok(vote(&chosen, train))
        })
        .collect::<Result<Vec<usize>>>()?;
    outcome(test, train, predictions)
}
