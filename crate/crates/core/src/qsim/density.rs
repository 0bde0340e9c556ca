use num_complex::Complex64;

use super::{c, Mat2, StateVector};
use crate::error::{Error, Result};

const TOLERANCE: f64 = 1e-10;

/// Single-qubit mixed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(m: Mat2) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let trace = (m[(0, 0)] + m[(1, 1)]).re;
        if (trace - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace} ≠ 1")));
        }
        let rho = DensityMatrix(m);
        let min_eig = rho.eigenvalues()[0];
        if min_eig < -TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a one-qubit state.
    pub fn from_state(state: &StateVector) -> Result<Self> {
        if state.num_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: state.num_qubits(),
            });
        }
        let (a, b) = (state.amplitudes()[0], state.amplitudes()[1]);
        Ok(Self::outer(a, b))
    }

    fn outer(a: Complex64, b: Complex64) -> Self {
        DensityMatrix(Mat2::new(
            a * a.conj(),
            a * b.conj(),
            b * a.conj(),
            b * b.conj(),
        ))
    }

    /// State with Bloch vector `r` (‖r‖ ≤ 1).
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let [x, y, z] = r;
        Self::new(Mat2::new(
            c((1.0 + z) / 2.0, 0.0),
            c(x / 2.0, -y / 2.0),
            c(x / 2.0, y / 2.0),
            c((1.0 - z) / 2.0, 0.0),
        ))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        (self.0[(0, 0)] + self.0[(1, 1)]).re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let half = self.trace() / 2.0;
        let det = (self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]).re;
        let disc = (half * half - det).max(0.0).sqrt();
        [half - disc, half + disc]
    }

    /// `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let off = self.0[(0, 1)];
        [
            2.0 * off.re,
            -2.0 * off.im,
            (self.0[(0, 0)] - self.0[(1, 1)]).re,
        ]
    }

    pub fn apply_unitary(&self, u: &Mat2) -> Self {
        DensityMatrix(u * self.0 * u.adjoint())
    }

    pub fn apply_kraus(&self, ops: &[Mat2]) -> Result<Self> {
        apply_kraus(self, ops)
    }
}

/// Largest deviation of `Σ K†K` from the identity; errors above tolerance.
pub fn check_kraus_complete(ops: &[Mat2]) -> Result<()> {
    if ops.is_empty() {
        return Err(Error::Empty("Kraus operator list"));
    }
    let sum = ops.iter().fold(Mat2::zeros(), |acc, k| acc + k.adjoint() * k);
    let deviation = (sum - Mat2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if deviation > TOLERANCE {
        return Err(Error::NotTracePreserving { deviation });
    }
    Ok(())
}

/// `ρ ↦ Σ K ρ K†`.
pub fn apply_kraus(rho: &DensityMatrix, ops: &[Mat2]) -> Result<DensityMatrix> {
    check_kraus_complete(ops)?;
    let out = ops
        .iter()
        .fold(Mat2::zeros(), |acc, k| acc + k * rho.0 * k.adjoint());
    // Clean up rounding so the output passes its own invariants.
    let herm = (out + out.adjoint()) * c(0.5, 0.0);
    DensityMatrix::new(herm)
}

/// Energy relaxation towards `|0⟩` with decay probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> Result<Vec<Mat2>> {
    check_probability("gamma", gamma)?;
    Ok(vec![
        Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - gamma).sqrt(), 0.0)),
        Mat2::new(c(0.0, 0.0), c(gamma.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)),
    ])
}

/// Pure dephasing with parameter `lambda`; coherences shrink by `√(1−λ)`.
pub fn phase_damping(lambda: f64) -> Result<Vec<Mat2>> {
    check_probability("lambda", lambda)?;
    Ok(vec![
        Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - lambda).sqrt(), 0.0)),
        Mat2::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(lambda.sqrt(), 0.0)),
    ])
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}
