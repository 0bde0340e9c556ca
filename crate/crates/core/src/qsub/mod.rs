//! Quantum subroutines used by the clustering algorithms: SWAP-test
//! fidelity and distance estimation, and Grover-based minimum finding.

mod qma;
mod swap;

pub(crate) use qma::qma_best_of;
pub use qma::{qma_minimize, qma_minimize_masked, QmaConfig, QmaResult};
pub use swap::{distance_estimate, quantum_distance, swap_test, DistanceEstimate, FidelityEstimate};
