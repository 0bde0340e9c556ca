use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encode::{amplitude_encode_padded, padded_dim, FeatureVector};
use crate::error::{Error, Result};
use crate::qsim::{binomial, GateOp, Shots, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    /// Probability (exact) or frequency (sampled) of reading the ancilla as 0.
    pub p0_hat: f64,
    /// `2·p0_hat − 1` clamped to `[0, 1]`.
    pub fidelity_hat: f64,
    /// Unclamped `2·p0_hat − 1`.
    pub raw_fidelity: f64,
    /// Zero in exact mode.
    pub shots_used: u64,
    /// `√(p0_hat(1−p0_hat)/shots)`, zero in exact mode.
    pub std_error: f64,
}

impl FidelityEstimate {
    fn from_p0(p0_hat: f64, shots_used: u64) -> Self {
        let raw_fidelity = 2.0 * p0_hat - 1.0;
        let std_error = if shots_used == 0 {
            0.0
        } else {
            (p0_hat * (1.0 - p0_hat) / shots_used as f64).sqrt()
        };
        FidelityEstimate {
            p0_hat,
            fidelity_hat: raw_fidelity.clamp(0.0, 1.0),
            raw_fidelity,
            shots_used,
            std_error,
        }
    }
}

/// Runs the SWAP test on `|a⟩` and `|b⟩`: ancilla H, qubit-wise controlled
/// SWAPs, ancilla H, then reads the ancilla.
///
/// The ancilla reads 0 with probability `(1 + |⟨a|b⟩|²)/2`.
pub fn swap_test<R: Rng + ?Sized>(
    a: &StateVector,
    b: &StateVector,
    shots: Shots,
    rng: &mut R,
) -> Result<FidelityEstimate> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: a.num_qubits(),
            actual: b.num_qubits(),
        });
    }
    swap_test_partial(a, b, shots, rng)
}

/// SWAP test between `a` and the leading `a.num_qubits()` qubits of `b`.
/// The remaining qubits of `b` are spectators.
fn swap_test_partial<R: Rng + ?Sized>(
    a: &StateVector,
    b: &StateVector,
    shots: Shots,
    rng: &mut R,
) -> Result<FidelityEstimate> {
    let n = a.num_qubits();
    debug_assert!(n <= b.num_qubits());
    let mut state = StateVector::zero(1)?.tensor(a)?.tensor(b)?;
    state.apply(&GateOp::h(0))?;
    for i in 0..n {
        state.apply(&GateOp::cswap(0, 1 + i, 1 + n + i))?;
    }
    state.apply(&GateOp::h(0))?;
    let p0 = state.probability(0, 0)?;
    Ok(match shots {
        Shots::Exact => FidelityEstimate::from_p0(p0, 0),
        Shots::Finite(0) => return Err(Error::invalid("shots must be at least 1")),
        Shots::Finite(s) => {
            let zeros = binomial(s, p0, rng)?;
            FidelityEstimate::from_p0(zeros as f64 / s as f64, s)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    /// Estimated `‖u − v‖²`.
    pub squared_distance: f64,
    /// Normalisation `‖u‖² + ‖v‖²`.
    pub z: f64,
    pub fidelity: FidelityEstimate,
}

/// Estimates `‖u − v‖²` with one SWAP test.
///
/// `|ψ⟩ = (|0⟩|u⟩ + |1⟩|v⟩)/√2` holds the amplitude-encoded vectors behind
/// an index qubit, and `|φ⟩ = (‖u‖|0⟩ − ‖v‖|1⟩)/√Z` with `Z = ‖u‖² + ‖v‖²`.
/// Swapping `|φ⟩` against the index qubit of `|ψ⟩` gives overlap
/// `‖u − v‖²/(2Z)`, so the distance is `2Z` times the fidelity estimate.
pub fn distance_estimate<R: Rng + ?Sized>(
    u: &FeatureVector,
    v: &FeatureVector,
    shots: Shots,
    rng: &mut R,
) -> Result<DistanceEstimate> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            actual: v.dim(),
        });
    }
    let dim = padded_dim(u.dim());
    let a = amplitude_encode_padded(u, dim)?;
    let b = amplitude_encode_padded(v, dim)?;
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let psi_amps: Vec<Complex64> = a
        .amplitudes()
        .iter()
        .chain(b.amplitudes())
        .map(|x| x * half)
        .collect();
    let psi = StateVector::normalized(psi_amps)?;
    let (nu, nv) = (u.norm(), v.norm());
    let z = nu * nu + nv * nv;
    let phi = StateVector::normalized(vec![Complex64::new(nu, 0.0), Complex64::new(-nv, 0.0)])?;
    let fidelity = swap_test_partial(&phi, &psi, shots, rng)?;
    Ok(DistanceEstimate {
        squared_distance: 2.0 * z * fidelity.fidelity_hat,
        z,
        fidelity,
    })
}

/// Estimated squared Euclidean distance; see [`distance_estimate`].
pub fn quantum_distance<R: Rng + ?Sized>(
    u: &FeatureVector,
    v: &FeatureVector,
    shots: Shots,
    rng: &mut R,
) -> Result<f64> {
    Ok(distance_estimate(u, v, shots, rng)?.squared_distance)
}
