use std::f64::consts::FRAC_1_SQRT_2;


use super::{c, unitarity_deviation, Mat2};
use crate::error::{Error, Result};

/// Tolerance for accepting a caller-supplied matrix as unitary.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    Ry(f64),
    U3 { theta: f64, phi: f64, lambda: f64 },
    Cnot,
    Cswap,
    Unitary(Mat2),
}

impl GateKind {
    /// 2×2 matrix of the single-qubit action, `None` for swap gates.
    pub fn matrix(&self) -> Option<Mat2> {
        let m = match *self {
            GateKind::H => Mat2::new(
                c(FRAC_1_SQRT_2, 0.0),
                c(FRAC_1_SQRT_2, 0.0),
                c(FRAC_1_SQRT_2, 0.0),
                c(-FRAC_1_SQRT_2, 0.0),
            ),
            GateKind::X | GateKind::Cnot => {
                Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
            }
            GateKind::Ry(theta) => {
                let (s, cs) = (theta / 2.0).sin_cos();
                Mat2::new(c(cs, 0.0), c(-s, 0.0), c(s, 0.0), c(cs, 0.0))
            }
            GateKind::U3 { theta, phi, lambda } => {
                let (s, cs) = (theta / 2.0).sin_cos();
                Mat2::new(
                    c(cs, 0.0),
                    -num_complex::Complex64::from_polar(s, lambda),
                    num_complex::Complex64::from_polar(s, phi),
                    num_complex::Complex64::from_polar(cs, phi + lambda),
                )
            }
            GateKind::Unitary(m) => m,
            GateKind::Cswap => return None,
        };
        Some(m)
    }

    fn target_count(&self) -> usize {
        match self {
            GateKind::Cswap => 2,
            _ => 1,
        }
    }
}

/// A gate together with the register lines it touches.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

impl GateOp {
    fn single(kind: GateKind, target: usize) -> Self {
        GateOp {
            kind,
            targets: vec![target],
            controls: Vec::new(),
        }
    }

    pub fn h(target: usize) -> Self {
        Self::single(GateKind::H, target)
    }

    pub fn x(target: usize) -> Self {
        Self::single(GateKind::X, target)
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Self::single(GateKind::Ry(theta), target)
    }

    pub fn u3(target: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Self::single(GateKind::U3 { theta, phi, lambda }, target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::Cnot,
            targets: vec![target],
            controls: vec![control],
        }
    }

    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        GateOp {
            kind: GateKind::Cswap,
            targets: vec![a, b],
            controls: vec![control],
        }
    }

    /// Arbitrary single-qubit unitary; rejected if `m†m` deviates from the
    /// identity by more than [`UNITARY_TOLERANCE`].
    pub fn unitary(target: usize, m: Mat2) -> Result<Self> {
        let deviation = unitarity_deviation(&m);
        if deviation > UNITARY_TOLERANCE {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(Self::single(GateKind::Unitary(m), target))
    }

    pub fn with_control(mut self, control: usize) -> Self {
        self.controls.push(control);
        self
    }

    /// Checks arity, index range and distinctness against a register size.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.target_count() {
            return Err(Error::InvalidGate(format!(
                "{:?} expects {} target(s), got {}",
                self.kind,
                self.kind.target_count(),
                self.targets.len()
            )));
        }
        if matches!(self.kind, GateKind::Cnot | GateKind::Cswap) && self.controls.len() != 1 {
            return Err(Error::InvalidGate(format!(
                "{:?} expects exactly one control",
                self.kind
            )));
        }
        let mut seen = 0u64;
        for &q in self.targets.iter().chain(&self.controls) {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
            if seen & (1 << q) != 0 {
                return Err(Error::InvalidGate(format!("qubit {q} used twice")));
            }
            seen |= 1 << q;
        }
        if let GateKind::Unitary(m) = &self.kind {
            let deviation = unitarity_deviation(m);
            if deviation > UNITARY_TOLERANCE {
                return Err(Error::NonUnitary { deviation });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn builtin_matrices_are_unitary() {
        let kinds = [
            GateKind::H,
            GateKind::X,
            GateKind::Ry(0.37),
            GateKind::Ry(-2.9),
            GateKind::U3 {
                theta: 1.1,
                phi: -0.4,
                lambda: 2.5,
            },
            GateKind::U3 {
                theta: PI,
                phi: PI / 3.0,
                lambda: 0.0,
            },
        ];
        for k in kinds {
            let m = k.matrix().unwrap();
            assert!(unitarity_deviation(&m) < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn u3_reduces_to_ry_for_zero_phases() {
        let a = GateKind::U3 {
            theta: 0.8,
            phi: 0.0,
            lambda: 0.0,
        }
        .matrix()
        .unwrap();
        let b = GateKind::Ry(0.8).matrix().unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_unitary_custom_matrix() {
        let m = Mat2::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(
            GateOp::unitary(0, m),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn validation_catches_bad_indices() {
        assert!(matches!(
            GateOp::h(3).validate(3),
            Err(Error::QubitOutOfRange { index: 3, .. })
        ));
        assert!(GateOp::cnot(1, 1).validate(2).is_err());
        assert!(GateOp::cswap(0, 1, 2).validate(3).is_ok());
        let mut bad = GateOp::cswap(0, 1, 2);
        bad.targets.pop();
        assert!(bad.validate(3).is_err());
    }
}
