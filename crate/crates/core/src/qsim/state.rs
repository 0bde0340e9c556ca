use num_complex::Complex64;

use super::{c, DensityMatrix, GateKind, GateOp, Mat2};
use crate::error::{Error, Result};

/// Register width limit; keeps dense vectors well inside memory.
pub const MAX_QUBITS: usize = 24;

const NORM_TOLERANCE: f64 = 1e-10;

/// Pure state of `num_qubits` qubits as a dense amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_width(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![c(0.0, 0.0); dim];
        amplitudes[index] = c(1.0, 0.0);
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps amplitudes that must already be normalised.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "length {dim} is not a power of two ≥ 2"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_width(num_qubits)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("squared norm {norm} ≠ 1")));
        }
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalises arbitrary nonzero amplitudes.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::from_amplitudes(amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `self ⊗ other`; `self`'s qubits come first.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        check_width(self.num_qubits + other.num_qubits)?;
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        Ok(StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let control_mask = gate.controls.iter().fold(0, |m, &q| m | self.mask(q));
        match gate.kind {
            GateKind::Cswap => {
                let (ma, mb) = (self.mask(gate.targets[0]), self.mask(gate.targets[1]));
                for i in 0..self.dim() {
                    if i & control_mask == control_mask && i & ma != 0 && i & mb == 0 {
                        self.amplitudes.swap(i, i ^ ma ^ mb);
                    }
                }
            }
            ref kind => {
                // validate() guarantees a matrix for every non-swap kind
                let m = kind.matrix().expect("single-qubit gate");
                self.apply_matrix(&m, self.mask(gate.targets[0]), control_mask);
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    fn apply_matrix(&mut self, m: &Mat2, target_mask: usize, control_mask: usize) {
        let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        for i in 0..self.dim() {
            if i & target_mask != 0 || i & control_mask != control_mask {
                continue;
            }
            let j = i | target_mask;
            let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = m00 * a + m01 * b;
            self.amplitudes[j] = m10 * a + m11 * b;
        }
    }

    /// Born probability of reading `outcome` (0 or 1) on `qubit`.
    pub fn probability(&self, qubit: usize, outcome: u8) -> Result<f64> {
        self.check_qubit(qubit)?;
        let want = match outcome {
            0 => 0,
            1 => self.mask(qubit),
            _ => return Err(Error::invalid(format!("outcome must be 0 or 1, got {outcome}"))),
        };
        let mask = self.mask(qubit);
        let p: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok(p.clamp(0.0, 1.0))
    }

    /// Full computational-basis distribution.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Joint distribution of `qubits`, indexed with `qubits[0]` as the most
    /// significant bit.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        if qubits.is_empty() {
            return Err(Error::Empty("qubit list"));
        }
        let masks: Vec<usize> = qubits.iter().map(|&q| self.mask(q)).collect();
        let mut out = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let k = masks
                .iter()
                .fold(0, |k, &m| (k << 1) | usize::from(i & m != 0));
            out[k] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Reduced density matrix of one qubit.
    pub fn reduced_qubit(&self, qubit: usize) -> Result<DensityMatrix> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let mut rho = Mat2::zeros();
        for i in (0..self.dim()).filter(|i| i & mask == 0) {
            let (a, b) = (self.amplitudes[i], self.amplitudes[i | mask]);
            rho[(0, 0)] += a * a.conj();
            rho[(0, 1)] += a * b.conj();
            rho[(1, 0)] += b * a.conj();
            rho[(1, 1)] += b * b.conj();
        }
        DensityMatrix::new(rho)
    }

    /// Negates the amplitude of every basis index satisfying `marked`.
    pub(crate) fn phase_flip_where(&mut self, mut marked: impl FnMut(usize) -> bool) {
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if marked(i) {
                *a = -*a;
            }
        }
    }

    /// Reflection `2|s⟩⟨s| − I` about the uniform superposition, i.e.
    /// `H^⊗n (2|0⟩⟨0| − I) H^⊗n`.
    pub(crate) fn invert_about_mean(&mut self) {
        let mean = self.amplitudes.iter().sum::<Complex64>() / self.dim() as f64;
        for a in &mut self.amplitudes {
            *a = 2.0 * mean - *a;
        }
    }
}

fn check_width(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::InvalidState(format!(
            "register width {num_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Returns `U|ψ⟩` without modifying the input.
pub fn apply_gate(state: &StateVector, gate: &GateOp) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

pub fn measure_qubit_probability(state: &StateVector, qubit: usize, outcome: u8) -> Result<f64> {
    state.probability(qubit, outcome)
}
