//! Exact pure-state simulation plus a single-qubit density-matrix engine.
//!
//! Qubit 0 is the most significant bit of a basis-state index, so
//! `|q0 q1 … q(n-1)⟩` reads left to right like a circuit diagram from top to
//! bottom.

mod density;
mod gate;
mod sample;
mod state;

pub use density::{amplitude_damping, apply_kraus, check_kraus_complete, phase_damping, DensityMatrix};
pub use gate::{GateKind, GateOp, UNITARY_TOLERANCE};
pub use sample::{sample_shots, MeasurementRecord, Shots};
pub(crate) use sample::binomial;
pub use state::{apply_gate, measure_qubit_probability, StateVector, MAX_QUBITS};

use nalgebra::Matrix2;
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;

pub(crate) const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entry-wise deviation of `m†m` from the identity.
pub fn unitarity_deviation(m: &Mat2) -> f64 {
    let prod = m.adjoint() * m;
    (prod - Mat2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Single-qubit rotation exp(-i θ/2 n·σ) about a unit axis `n`.
pub fn axis_rotation(axis: [f64; 3], angle: f64) -> Mat2 {
    let (s, cs) = (angle / 2.0).sin_cos();
    let [nx, ny, nz] = axis;
    Mat2::new(
        c(cs, -s * nz),
        c(-s * ny, -s * nx),
        c(s * ny, -s * nx),
        c(cs, s * nz),
    )
}
