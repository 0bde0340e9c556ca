//! Quantum KNN and k-means built on SWAP-test distances and Grover minimum
//! finding, the matching classical baselines, and the cost models used to
//! compare them.

mod confusion;
mod cost;
mod kmeans;
mod knn;

pub use confusion::{adjusted_rand_index, ConfusionMatrix};
pub use cost::{cost_curve, find_crossover, kmeans_cost, knn_cost, Algorithm, CostMode, CostModelParams, CostPoint};
pub use kmeans::{kmeans_cluster, kmeans_objective, qkmeans_cluster, KMeansResult};
pub use knn::{knn_classify, qknn_classify, KnnOutcome};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encode::FeatureVector;
use crate::error::Result;
use crate::qsim::Shots;
use crate::qsub::{qma_best_of, quantum_distance, QmaConfig};

/// How the closest candidate is picked from a table of estimated distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Classical argmin; ties go to the smaller index.
    Exact,
    /// Grover minimum finding, repeated and the best run kept.
    Grover { repetitions: u32 },
}

/// Knobs shared by the quantum clustering algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumSettings {
    /// SWAP-test repetitions per distance (`n_ST`).
    pub swap_shots: Shots,
    /// Neighbour/centroid selection (`n_QMA` repetitions when Grover).
    pub selection: Selection,
    pub qma: QmaConfig,
}

impl QuantumSettings {
    /// Exact distances and exact argmin: reproduces the classical baseline.
    pub fn exact() -> Self {
        QuantumSettings {
            swap_shots: Shots::Exact,
            selection: Selection::Exact,
            qma: QmaConfig::default(),
        }
    }

    pub fn sampled(n_st: u64, n_qma: u32) -> Self {
        QuantumSettings {
            swap_shots: Shots::Finite(n_st),
            selection: Selection::Grover {
                repetitions: n_qma,
            },
            qma: QmaConfig::default(),
        }
    }

    fn distances<R: Rng + ?Sized>(
        &self,
        point: &FeatureVector,
        others: &[FeatureVector],
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        others
            .iter()
            .map(|o| quantum_distance(point, o, self.swap_shots, rng))
            .collect()
    }

    fn select<R: Rng + ?Sized>(
        &self,
        table: &[f64],
        excluded: &[usize],
        rng: &mut R,
    ) -> Result<usize> {
        match self.selection {
            Selection::Exact => Ok(exact_argmin(table, excluded).expect("nonempty candidate set")),
            Selection::Grover { repetitions } => {
                Ok(qma_best_of(table, excluded, repetitions, &self.qma, rng)?.argmin_index)
            }
        }
    }
}

/// Index of the smallest entry not in `excluded`; ties go to the smaller
/// index.
pub(crate) fn exact_argmin(table: &[f64], excluded: &[usize]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in table.iter().enumerate() {
        if excluded.contains(&i) {
            continue;
        }
        if best.is_none_or(|b| v < table[b]) {
            best = Some(i);
        }
    }
    best
}
