use std::f64::consts::{FRAC_PI_2, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::encode::{angle_encode, FeatureVector, RescaleParams};
use crate::error::{Error, Result};
use crate::qsim::{binomial, GateOp, Shots, StateVector};

/// Number of angles for a tree over `num_features` (a power of two) qubits.
pub fn theta_count(num_features: usize) -> usize {
    2 * (num_features - 1) + 1
}

fn serialize_wrapped<S: Serializer>(thetas: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let wrapped: Vec<f64> = thetas.iter().map(|t| t.rem_euclid(TAU)).collect();
    wrapped.serialize(s)
}

/// Binary classifier: a trained tree plus the rescaler fitted on its
/// training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtnModel {
    /// Raw feature count before zero-padding.
    pub input_features: usize,
    /// Qubit count of the tree (power of two ≥ 2).
    pub num_features: usize,
    /// Tree-ordered angles, serialised modulo 2π (the read-out probability
    /// has period 2π in every angle).
    #[serde(serialize_with = "serialize_wrapped")]
    pub thetas: Vec<f64>,
    pub output_qubit: usize,
    pub rescaler: RescaleParams,
}

impl TtnModel {
    pub fn new(rescaler: RescaleParams, thetas: Vec<f64>) -> Result<Self> {
        let input_features = rescaler.dim();
        let num_features = input_features.max(2).next_power_of_two();
        if thetas.len() != theta_count(num_features) {
            return Err(Error::DimensionMismatch {
                expected: theta_count(num_features),
                actual: thetas.len(),
            });
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("non-finite angle"));
        }
        Ok(TtnModel {
            input_features,
            num_features,
            thetas,
            output_qubit: num_features - 1,
            rescaler,
        })
    }

    /// Checks invariants of a deserialised model.
    pub fn validate(&self) -> Result<()> {
        let fresh = TtnModel::new(self.rescaler.clone(), self.thetas.clone())?;
        if fresh.num_features != self.num_features || fresh.output_qubit != self.output_qubit {
            return Err(Error::invalid("inconsistent TTN model dimensions"));
        }
        Ok(())
    }

    /// Rescales, clips and zero-pads raw features to angles.
    pub fn prepare(&self, x: &FeatureVector) -> Result<FeatureVector> {
        let scaled = self.rescaler.transform(x)?;
        Ok(scaled.padded(self.num_features))
    }

    /// Exact `P(|0⟩)` of the output qubit for raw features `x`.
    pub fn p0(&self, x: &FeatureVector) -> Result<f64> {
        p0_prepared(&self.thetas, &self.prepare(x)?)
    }

    /// `P(|0⟩)` either exactly or as an `s`-shot frequency.
    pub fn forward<R: Rng + ?Sized>(&self, x: &FeatureVector, shots: Shots, rng: &mut R) -> Result<f64> {
        let p = self.p0(x)?;
        match shots {
            Shots::Exact => Ok(p),
            Shots::Finite(0) => Err(Error::invalid("shots must be at least 1")),
            Shots::Finite(s) => Ok(binomial(s, p, rng)? as f64 / s as f64),
        }
    }

    /// `∂P(|0⟩)/∂θ` by the parameter-shift rule.
    pub fn gradient(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        p0_gradient(&self.thetas, &self.prepare(x)?)
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<usize> {
        Ok(ttn_predict(self.p0(x)?))
    }
}

/// Label 0 iff `P(|0⟩) < 0.5`, label 1 otherwise.
pub fn ttn_predict(p0: f64) -> usize {
    usize::from(p0 >= 0.5)
}

/// Gate list of the tree on `num_features` qubits (without the encoding).
pub fn tree_gates(num_features: usize, thetas: &[f64]) -> Vec<GateOp> {
    let mut gates = Vec::with_capacity(3 * num_features);
    let mut live: Vec<usize> = (0..num_features).collect();
    let mut k = 0;
    while live.len() > 1 {
        let mut next = Vec::with_capacity(live.len() / 2);
        for pair in live.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            gates.push(GateOp::ry(a, thetas[k]));
            gates.push(GateOp::ry(b, thetas[k + 1]));
            gates.push(GateOp::cnot(a, b));
            k += 2;
            next.push(b);
        }
        live = next;
    }
    gates.push(GateOp::ry(live[0], thetas[k]));
    gates
}

/// Post-circuit state for already prepared angles.
pub(crate) fn run_circuit(thetas: &[f64], angles: &FeatureVector) -> Result<StateVector> {
    let mut state = angle_encode(angles)?;
    state.apply_all(&tree_gates(angles.dim(), thetas))?;
    Ok(state)
}

pub(crate) fn p0_prepared(thetas: &[f64], angles: &FeatureVector) -> Result<f64> {
    let state = run_circuit(thetas, angles)?;
    state.probability(angles.dim() - 1, 0)
}

/// `∂P(|0⟩)/∂θ` for every angle by the parameter-shift rule:
/// `[f(θ + π/2) − f(θ − π/2)] / 2`, exact for `RY` generators.
pub(crate) fn p0_gradient(thetas: &[f64], angles: &FeatureVector) -> Result<Vec<f64>> {
    let mut shifted = thetas.to_vec();
    (0..thetas.len())
        .map(|i| {
            shifted[i] = thetas[i] + FRAC_PI_2;
            let plus = p0_prepared(&shifted, angles)?;
            shifted[i] = thetas[i] - FRAC_PI_2;
            let minus = p0_prepared(&shifted, angles)?;
            shifted[i] = thetas[i];
            Ok((plus - minus) / 2.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn model(thetas: Vec<f64>) -> TtnModel {
        let lo = FeatureVector::new(vec![0.0; 4]).unwrap();
        let hi = FeatureVector::new(vec![1.0; 4]).unwrap();
        TtnModel::new(RescaleParams::fit([&lo, &hi]).unwrap(), thetas).unwrap()
    }

    #[test]
    fn four_features_use_seven_angles() {
        assert_eq!(theta_count(4), 7);
        assert_eq!(theta_count(8), 15);
        assert_eq!(tree_gates(4, &[0.0; 7]).len(), 10);
        assert!(TtnModel::new(model(vec![0.0; 7]).rescaler, vec![0.0; 6]).is_err());
    }

    #[test]
    fn identity_circuit_on_zero_input() {
        let m = model(vec![0.0; 7]);
        let x = FeatureVector::new(vec![0.0; 4]).unwrap();
        assert!((m.p0(&x).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(m.predict(&x).unwrap(), 1);
    }

    #[test]
    fn prediction_threshold() {
        assert_eq!(ttn_predict(0.3), 0);
        assert_eq!(ttn_predict(0.9), 1);
        assert_eq!(ttn_predict(0.5), 1);
    }

    #[test]
    fn shot_estimate_is_close_to_exact() {
        let m = model(vec![0.3, -1.2, 2.0, 0.7, -0.4, 1.9, 0.2]);
        let x = FeatureVector::new(vec![0.2, 0.9, 0.4, 0.6]).unwrap();
        let p = m.p0(&x).unwrap();
        let mut rng = rng_from_seed(1);
        let est = m.forward(&x, Shots::Finite(1001), &mut rng).unwrap();
        assert!((est - p).abs() <= 4.0 * (p * (1.0 - p) / 1001.0).sqrt());
        assert!(m.forward(&x, Shots::Finite(0), &mut rng).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let m = model(vec![0.0; 7]);
        assert!(m.p0(&FeatureVector::new(vec![0.0; 3]).unwrap()).is_err());
    }

    #[test]
    fn serialised_angles_are_wrapped() {
        let m = model(vec![-1.0, 7.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let json = serde_json::to_value(&m).unwrap();
        let t = json["thetas"].as_array().unwrap();
        assert!((t[0].as_f64().unwrap() - (TAU - 1.0)).abs() < 1e-12);
        assert!((t[1].as_f64().unwrap() - (7.0 - TAU)).abs() < 1e-12);
        let back: TtnModel = serde_json::from_value(json).unwrap();
        let x = FeatureVector::new(vec![0.3, 0.1, 0.8, 0.5]).unwrap();
        assert!((back.p0(&x).unwrap() - m.p0(&x).unwrap()).abs() < 1e-12);
    }
}
