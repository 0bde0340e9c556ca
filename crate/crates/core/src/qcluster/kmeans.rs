use rand::seq::index::sample;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{exact_argmin, QuantumSettings};
use crate::encode::FeatureVector;
use crate::error::{Error, Result};
use crate::rng::{child_rng, derive_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<FeatureVector>,
    pub iterations: usize,
    pub converged: bool,
    /// Exact sum of squared distances to assigned centroids after each
    /// centroid update.
    pub objective_history: Vec<f64>,
}

pub fn kmeans_objective(data: &[FeatureVector], centroids: &[FeatureVector], assignments: &[usize]) -> f64 {
    data.iter()
        .zip(assignments)
        .map(|(x, &c)| x.squared_distance(&centroids[c]))
        .sum()
}

/// Classical Lloyd iteration with exact distances.
pub fn kmeans_cluster(data: &[FeatureVector], k: usize, seed: u64, max_iters: usize) -> Result<KMeansResult> {
    lloyd(data, k, seed, max_iters, |x, centroids, _rng| {
        let table: Vec<f64> = centroids.iter().map(|c| x.squared_distance(c)).collect();
        Ok(exact_argmin(&table, &[]).expect("k ≥ 2"))
    })
}

/// Lloyd iteration whose assignment step estimates point–centroid distances
/// with SWAP tests and picks the nearest centroid with the configured
/// selection. Centroid updates are classical means.
pub fn qkmeans_cluster(
    data: &[FeatureVector],
    k: usize,
    settings: &QuantumSettings,
    seed: u64,
    max_iters: usize,
) -> Result<KMeansResult> {
    lloyd(data, k, seed, max_iters, |x, centroids, rng| {
        let table = settings.distances(x, centroids, rng)?;
        settings.select(&table, &[], rng)
    })
}

fn lloyd<F>(data: &[FeatureVector], k: usize, seed: u64, max_iters: usize, assign: F) -> Result<KMeansResult>
where
    F: Fn(&FeatureVector, &[FeatureVector], &mut crate::rng::SimRng) -> Result<usize> + Sync,
{
    if k < 2 {
        return Err(Error::invalid("k-means needs k ≥ 2"));
    }
    if data.len() < k {
        return Err(Error::invalid(format!(
            "{} points cannot form {k} clusters",
            data.len()
        )));
    }
    let dim = data[0].dim();
    if let Some(v) = data.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: v.dim(),
        });
    }

    let mut init_rng = child_rng(seed, 0);
    let mut init: Vec<usize> = sample(&mut init_rng, data.len(), k).into_vec();
    init.sort_unstable();
    let mut centroids: Vec<FeatureVector> = init.iter().map(|&i| data[i].clone()).collect();

    let mut assignments: Vec<usize> = Vec::new();
    let mut objective_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iters {
        iterations += 1;
        let round_seed = derive_seed(seed, iterations as u64);
        let mut next = data
            .par_iter()
            .enumerate()
            .map(|(i, x)| assign(x, &centroids, &mut child_rng(round_seed, i as u64)))
            .collect::<Result<Vec<usize>>>()?;
        repair_empty_clusters(data, &centroids, &mut next, k);
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
        centroids = update_centroids(data, &assignments, k)?;
        objective_history.push(kmeans_objective(data, &centroids, &assignments));
    }

    Ok(KMeansResult {
        assignments,
        centroids,
        iterations,
        converged,
        objective_history,
    })
}

/// Moves the point farthest from its centroid into each empty cluster.
fn repair_empty_clusters(data: &[FeatureVector], centroids: &[FeatureVector], assignments: &mut [usize], k: usize) {
    let mut moved: Vec<usize> = Vec::new();
    for c in 0..k {
        if assignments.contains(&c) {
            continue;
        }
        let mut far: Option<(f64, usize)> = None;
        for (i, x) in data.iter().enumerate() {
            if moved.contains(&i) {
                continue;
            }
            let d = x.squared_distance(&centroids[assignments[i]]);
            if far.is_none_or(|(best, _)| d > best) {
                far = Some((d, i));
            }
        }
        if let Some((_, i)) = far {
            assignments[i] = c;
            moved.push(i);
        }
    }
}

fn update_centroids(data: &[FeatureVector], assignments: &[usize], k: usize) -> Result<Vec<FeatureVector>> {
    let dim = data[0].dim();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (x, &c) in data.iter().zip(assignments) {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(x.values()) {
            *s += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, n)| FeatureVector::new(s.into_iter().map(|v| v / n.max(1) as f64).collect()))
        .collect()
}
