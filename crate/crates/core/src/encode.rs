//! Classical-to-quantum encodings.
//!
//! * Amplitude encoding stores a (zero-padded) `d`-vector in `⌈log₂ d⌉`
//!   qubits with amplitudes `vᵢ/‖v‖₂`.
//! * Angle encoding stores each feature `xᵢ ∈ [0, π/2]` on its own qubit as
//!   `cos xᵢ|0⟩ + sin xᵢ|1⟩`. Raw features are mapped into that interval by a
//!   [`RescaleParams`] fitted on training data.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{GateOp, StateVector};

/// Tolerance when checking that rescaled features lie in `[0, π/2]`.
const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("feature vector"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("feature {i} is not finite")));
        }
        Ok(FeatureVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn squared_distance(&self, other: &FeatureVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// Copy zero-padded to length `dim`.
    pub fn padded(&self, dim: usize) -> FeatureVector {
        let mut v = self.0.clone();
        v.resize(dim.max(v.len()), 0.0);
        FeatureVector(v)
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        FeatureVector::new(values)
    }
}

/// Smallest power of two ≥ `max(d, 2)`.
pub fn padded_dim(d: usize) -> usize {
    d.max(2).next_power_of_two()
}

/// `|v⟩ = Σ vᵢ/‖v‖ |i⟩` after zero-padding to a power of two.
pub fn amplitude_encode(v: &FeatureVector) -> Result<StateVector> {
    amplitude_encode_padded(v, padded_dim(v.dim()))
}

/// Amplitude encoding into a register of exactly `dim` amplitudes.
pub fn amplitude_encode_padded(v: &FeatureVector, dim: usize) -> Result<StateVector> {
    if dim < v.dim() || !dim.is_power_of_two() || dim < 2 {
        return Err(Error::invalid(format!(
            "cannot encode a {}-vector into {dim} amplitudes",
            v.dim()
        )));
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut amps: Vec<Complex64> = v
        .values()
        .iter()
        .map(|&x| Complex64::new(x / norm, 0.0))
        .collect();
    amps.resize(dim, Complex64::new(0.0, 0.0));
    StateVector::normalized(amps)
}

/// Per-feature affine map onto `[0, π/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl RescaleParams {
    /// Fits observed per-feature ranges.
    pub fn fit<'a>(data: impl IntoIterator<Item = &'a FeatureVector>) -> Result<Self> {
        let mut iter = data.into_iter();
        let first = iter.next().ok_or(Error::Empty("dataset"))?;
        let mut min = first.values().to_vec();
        let mut max = min.clone();
        for v in iter {
            if v.dim() != min.len() {
                return Err(Error::DimensionMismatch {
                    expected: min.len(),
                    actual: v.dim(),
                });
            }
            for (j, &x) in v.values().iter().enumerate() {
                min[j] = min[j].min(x);
                max[j] = max[j].max(x);
            }
        }
        Ok(RescaleParams { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Indices of features whose fitted range is empty; those map to π/4.
    pub fn constant_features(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.max[j] <= self.min[j]).collect()
    }

    /// Maps into `[0, π/2]`, clipping values outside the fitted range.
    pub fn transform(&self, v: &FeatureVector) -> Result<FeatureVector> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.dim(),
            });
        }
        let out = v
            .values()
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let span = self.max[j] - self.min[j];
                if span <= 0.0 {
                    FRAC_PI_4
                } else {
                    ((x - self.min[j]) / span * FRAC_PI_2).clamp(0.0, FRAC_PI_2)
                }
            })
            .collect();
        FeatureVector::new(out)
    }
}

/// Gates preparing the angle encoding of `x` from `|0…0⟩`: `RY(2xᵢ)` on
/// qubit `i`, which equals `U3(2xᵢ, 0, 0)`.
pub fn angle_encoding_gates(x: &FeatureVector) -> Vec<GateOp> {
    x.values()
        .iter()
        .enumerate()
        .map(|(i, &xi)| GateOp::u3(i, 2.0 * xi, 0.0, 0.0))
        .collect()
}

/// `⊗ᵢ (cos xᵢ|0⟩ + sin xᵢ|1⟩)`.
pub fn angle_encode(x: &FeatureVector) -> Result<StateVector> {
    check_angle_range(x)?;
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for &xi in x.values() {
        let (s, c) = xi.sin_cos();
        amps = amps
            .iter()
            .flat_map(|a| [a * c, a * s])
            .collect();
    }
    StateVector::from_amplitudes(amps)
}

pub(crate) fn check_angle_range(x: &FeatureVector) -> Result<()> {
    if let Some((i, v)) = x
        .values()
        .iter()
        .enumerate()
        .find(|(_, &v)| !(-RANGE_SLACK..=FRAC_PI_2 + RANGE_SLACK).contains(&v))
    {
        return Err(Error::invalid(format!(
            "angle feature {i} = {v} outside [0, π/2]"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::new(v.to_vec()).unwrap()
    }

    fn amp(s: &StateVector, i: usize) -> f64 {
        assert!(s.amplitudes()[i].im.abs() < 1e-15);
        s.amplitudes()[i].re
    }

    #[test]
    fn amplitude_encoding_examples() {
        let s = amplitude_encode(&fv(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(s.num_qubits(), 2);
        assert!((amp(&s, 0) - 1.0).abs() < 1e-15);

        let s = amplitude_encode(&fv(&[1.0; 4])).unwrap();
        assert!((0..4).all(|i| (amp(&s, i) - 0.5).abs() < 1e-15));

        let s = amplitude_encode(&fv(&[3.0, 4.0])).unwrap();
        assert_eq!(s.num_qubits(), 1);
        assert!((amp(&s, 0) - 0.6).abs() < 1e-15);
        assert!((amp(&s, 1) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn amplitude_encoding_pads_to_power_of_two() {
        let s = amplitude_encode(&fv(&[1.0, 2.0, 2.0])).unwrap();
        assert_eq!(s.num_qubits(), 2);
        assert_eq!(amp(&s, 3), 0.0);
        let s = amplitude_encode(&fv(&[-2.0])).unwrap();
        assert_eq!(s.num_qubits(), 1);
        assert!((amp(&s, 0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(
            amplitude_encode(&fv(&[0.0, 0.0])),
            Err(Error::ZeroVector)
        ));
        assert!(FeatureVector::new(vec![]).is_err());
        assert!(FeatureVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn rescaler_endpoints_and_midpoint() {
        let data = [fv(&[0.0, 3.0]), fv(&[10.0, 3.0])];
        let r = RescaleParams::fit(&data).unwrap();
        let hi = r.transform(&fv(&[10.0, 3.0])).unwrap();
        assert!((hi.values()[0] - FRAC_PI_2).abs() < 1e-15);
        let mid = r.transform(&fv(&[5.0, 3.0])).unwrap();
        assert!((mid.values()[0] - FRAC_PI_4).abs() < 1e-15);
        // constant feature goes to the midpoint
        assert_eq!(mid.values()[1], FRAC_PI_4);
        assert_eq!(r.constant_features(), vec![1]);
    }

    #[test]
    fn rescaler_clips_out_of_range_values() {
        let r = RescaleParams::fit(&[fv(&[0.0]), fv(&[1.0])]).unwrap();
        assert_eq!(r.transform(&fv(&[-3.0])).unwrap().values()[0], 0.0);
        assert_eq!(r.transform(&fv(&[7.0])).unwrap().values()[0], FRAC_PI_2);
        assert!(r.transform(&fv(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn angle_encoding_examples() {
        let s = angle_encode(&fv(&[0.0, 0.0])).unwrap();
        assert!((amp(&s, 0) - 1.0).abs() < 1e-15);
        let s = angle_encode(&fv(&[FRAC_PI_2])).unwrap();
        assert!((amp(&s, 1) - 1.0).abs() < 1e-15);
        // kron of two (1/√2, 1/√2) factors
        let s = angle_encode(&fv(&[FRAC_PI_4, FRAC_PI_4])).unwrap();
        assert!((0..4).all(|i| (amp(&s, i) - 0.5).abs() < 1e-15));
        assert!(angle_encode(&fv(&[2.0])).is_err());
    }

    #[test]
    fn angle_encoding_gates_match_direct_product() {
        let x = fv(&[0.1, 1.2, 0.7]);
        let mut s = StateVector::zero(3).unwrap();
        s.apply_all(&angle_encoding_gates(&x)).unwrap();
        let direct = angle_encode(&x).unwrap();
        assert!((s.fidelity(&direct).unwrap() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn amplitude_encoding_is_scale_invariant(
            v in proptest::collection::vec(-5.0f64..5.0, 1..9),
            scale in 0.01f64..100.0,
        ) {
            let v = FeatureVector::new(v).unwrap();
            prop_assume!(v.norm() > 1e-6);
            let scaled = FeatureVector::new(v.values().iter().map(|x| x * scale).collect()).unwrap();
            let a = amplitude_encode(&v).unwrap();
            let b = amplitude_encode(&scaled).unwrap();
            prop_assert!((a.norm_sqr() - 1.0).abs() < 1e-10);
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn angle_encoding_is_a_product_state(
            x in proptest::collection::vec(0.0f64..=FRAC_PI_2, 1..7),
        ) {
            let s = angle_encode(&FeatureVector::new(x.clone()).unwrap()).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            for q in 0..x.len() {
                let b = s.reduced_qubit(q).unwrap().bloch_vector();
                let len = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
                prop_assert!((len - 1.0).abs() < 1e-10);
            }
        }
    }
}
