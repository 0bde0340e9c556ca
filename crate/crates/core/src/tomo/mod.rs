//! Single-qubit state tomography: Pauli-basis measurement simulation
//! under noise, a maximum-likelihood baseline and a regression-network
//! estimator.

mod measure;
mod mle;
mod noise;
mod pipeline;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qsim::{DensityMatrix, StateVector};
use crate::rng::rng_from_seed;

pub use measure::{simulate_measurements, Basis, BasisCounts, TomogramRecord};
pub use mle::{log_likelihood, mle_reconstruct, MleEstimate, MLE_RESTARTS};
pub use noise::NoiseChannel;
pub use pipeline::{
    neurotomography_pipeline, network_estimate, ExperimentRow, InfidelityStats, TomoConfig, TomoReport,
};

/// Pure qubit state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub theta: f64,
    pub phi: f64,
}

impl BlochState {
    /// Canonicalises any finite angles to `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        BlochState::from_vector([s * cp, s * sp, c])
    }

    /// Direction of `r`; the zero vector maps to `|0⟩`.
    pub fn from_vector(r: [f64; 3]) -> Self {
        let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return BlochState { theta: 0.0, phi: 0.0 };
        }
        let theta = (r[2] / n).clamp(-1.0, 1.0).acos();
        let phi = r[1].atan2(r[0]).rem_euclid(TAU);
        BlochState { theta, phi: if phi >= TAU { 0.0 } else { phi } }
    }

    pub fn vector(&self) -> [f64; 3] {
        let (s, c) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [s * cp, s * sp, c]
    }

    pub fn state(&self) -> StateVector {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let amps = vec![Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi)];
        StateVector::from_amplitudes(amps).expect("unit norm by construction")
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_state(&self.state()).expect("pure state is a valid density matrix")
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &BlochState, b: &BlochState) -> f64 {
    a.state().fidelity(&b.state()).expect("both are single-qubit states")
}

/// Rotation-invariant samples: `cos θ` uniform on `[−1, 1]`, `φ` uniform on
/// `[0, 2π)`.
pub fn sample_bloch_uniform(count: usize, seed: u64) -> Vec<BlochState> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..=1.0);
            let phi = rng.random_range(0.0..TAU);
            BlochState { theta: z.acos().clamp(0.0, PI), phi }
        })
        .collect()
}

pub(crate) fn check_sample_size(sample_size: u64) -> Result<()> {
    if sample_size < 3 {
        return Err(crate::error::Error::invalid("sample_size must be at least 3"));
    }
    Ok(())
}
