use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{amplitude_damping, axis_rotation, phase_damping, DensityMatrix, Mat2};
use crate::rng::rng_from_seed;

/// Error process applied to the prepared state before measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseChannel {
    None,
    /// Fixed rotation by `angle` radians about `axis`.
    SystematicUnitary { axis: [f64; 3], angle: f64 },
    /// Rotation about a fixed `axis` by an angle redrawn per shot from
    /// `Normal(0, angle_std)`.
    RandomUnitary { axis: [f64; 3], angle_std: f64 },
    /// Amplitude damping `gamma` followed by phase damping `lambda`.
    AmplitudePhase { gamma: f64, lambda: f64 },
}

impl NoiseChannel {
    pub fn default_systematic() -> Self {
        NoiseChannel::SystematicUnitary { axis: [0.0, 1.0, 0.0], angle: 0.15 }
    }

    /// Default random-unitary channel; its axis is drawn uniformly from the
    /// sphere with `seed`.
    pub fn default_random(seed: u64) -> Self {
        let b = super::sample_bloch_uniform(1, seed)[0];
        NoiseChannel::RandomUnitary { axis: b.vector(), angle_std: 0.15 }
    }

    pub fn default_amplitude_phase() -> Self {
        NoiseChannel::AmplitudePhase { gamma: 0.1, lambda: 0.1 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseChannel::None => "none",
            NoiseChannel::SystematicUnitary { .. } => "systematic_unitary",
            NoiseChannel::RandomUnitary { .. } => "random_unitary",
            NoiseChannel::AmplitudePhase { .. } => "amplitude_phase",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_axis = |axis: &[f64; 3]| {
            let n = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
            if !(n.is_finite() && (n - 1.0).abs() < 1e-9) {
                return Err(Error::invalid("rotation axis must be a unit vector"));
            }
            Ok(())
        };
        match self {
            NoiseChannel::None => Ok(()),
            NoiseChannel::SystematicUnitary { axis, angle } => {
                check_axis(axis)?;
                if !angle.is_finite() {
                    return Err(Error::invalid("rotation angle must be finite"));
                }
                Ok(())
            }
            NoiseChannel::RandomUnitary { axis, angle_std } => {
                check_axis(axis)?;
                if !(*angle_std >= 0.0 && angle_std.is_finite()) {
                    return Err(Error::invalid("angle_std must be finite and non-negative"));
                }
                Ok(())
            }
            NoiseChannel::AmplitudePhase { gamma, lambda } => {
                amplitude_damping(*gamma)?;
                phase_damping(*lambda)?;
                Ok(())
            }
        }
    }

    /// Kraus operators of a shot-independent channel.
    pub(crate) fn kraus(&self) -> Result<Option<Vec<Mat2>>> {
        match self {
            NoiseChannel::None => Ok(None),
            NoiseChannel::SystematicUnitary { axis, angle } => Ok(Some(vec![axis_rotation(*axis, *angle)])),
            NoiseChannel::AmplitudePhase { gamma, lambda } => {
                let ad = amplitude_damping(*gamma)?;
                let pd = phase_damping(*lambda)?;
                Ok(Some(pd.iter().flat_map(|p| ad.iter().map(move |a| p * a)).collect()))
            }
            NoiseChannel::RandomUnitary { .. } => Ok(None),
        }
    }

    /// Output of a shot-independent channel; for the random-unitary kind
    /// this is one draw of the rotation.
    pub fn apply<R: Rng + ?Sized>(&self, rho: &DensityMatrix, rng: &mut R) -> Result<DensityMatrix> {
        self.validate()?;
        match self {
            NoiseChannel::RandomUnitary { axis, angle_std } => {
                let angle = normal(*angle_std)?.sample(rng);
                Ok(rho.apply_unitary(&axis_rotation(*axis, angle)))
            }
            _ => match self.kraus()? {
                None => Ok(rho.clone()),
                Some(ops) => rho.apply_kraus(&ops),
            },
        }
    }

    /// Convenience for deterministic kinds.
    pub fn apply_deterministic(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply(rho, &mut rng_from_seed(0))
    }
}

pub(crate) fn normal(std: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, std).map_err(|e| Error::invalid(e.to_string()))
}

/// Rodrigues rotation of a Bloch vector; matches conjugation by
/// `exp(−iθ n·σ/2)`.
pub(crate) fn rotate_bloch(r: [f64; 3], n: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let dot = n[0] * r[0] + n[1] * r[1] + n[2] * r[2];
    let cross = [n[1] * r[2] - n[2] * r[1], n[2] * r[0] - n[0] * r[2], n[0] * r[1] - n[1] * r[0]];
    [0, 1, 2].map(|i| r[i] * c + cross[i] * s + n[i] * dot * (1.0 - c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::check_kraus_complete;
    use crate::tomo::BlochState;

    #[test]
    fn amplitude_phase_is_complete() {
        let ops = NoiseChannel::AmplitudePhase { gamma: 0.3, lambda: 0.6 }.kraus().unwrap().unwrap();
        check_kraus_complete(&ops).unwrap();
    }

    #[test]
    fn systematic_rotation_is_special_unitary() {
        let ops = NoiseChannel::default_systematic().kraus().unwrap().unwrap();
        assert!((ops[0].determinant().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rodrigues_matches_conjugation() {
        let b = BlochState::new(1.0, 0.4);
        let n = BlochState::new(2.0, 3.0).vector();
        let via_matrix = b.density().apply_unitary(&axis_rotation(n, 0.7)).bloch_vector();
        let via_vector = rotate_bloch(b.vector(), n, 0.7);
        for (a, c) in via_matrix.iter().zip(via_vector) {
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(NoiseChannel::AmplitudePhase { gamma: 1.5, lambda: 0.0 }.validate().is_err());
        assert!(NoiseChannel::SystematicUnitary { axis: [0.0, 2.0, 0.0], angle: 0.1 }.validate().is_err());
        assert!(NoiseChannel::RandomUnitary { axis: [1.0, 0.0, 0.0], angle_std: -1.0 }.validate().is_err());
    }

    #[test]
    fn serde_tagging() {
        let json = serde_json::to_string(&NoiseChannel::default_amplitude_phase()).unwrap();
        assert_eq!(json, r#"{"kind":"amplitude_phase","gamma":0.1,"lambda":0.1}"#);
        let none: NoiseChannel = serde_json::from_str(r#"{"kind":"none"}"#).unwrap();
        assert_eq!(none, NoiseChannel::None);
    }
}
