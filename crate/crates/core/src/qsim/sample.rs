use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::StateVector;
use crate::error::{Error, Result};

/// How a probability is read out of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shots {
    /// Exact Born probability (the infinite-shot limit).
    Exact,
    /// Empirical frequency over this many shots.
    Finite(u64),
}

impl Shots {
    pub fn is_exact(self) -> bool {
        matches!(self, Shots::Exact)
    }
}

/// Histogram of measured bit strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// Bit strings list the measured qubits in request order; only observed
    /// outcomes appear.
    pub outcome_counts: BTreeMap<String, u64>,
    pub total_shots: u64,
}

impl MeasurementRecord {
    pub fn count(&self, outcome: &str) -> u64 {
        self.outcome_counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn frequency(&self, outcome: &str) -> f64 {
        self.count(outcome) as f64 / self.total_shots as f64
    }
}

/// Draws `shots` i.i.d. measurements of `qubits` from the Born distribution.
///
/// The multinomial histogram is generated as a chain of conditional
/// binomials, which has the same law as shot-by-shot sampling.
pub fn sample_shots<R: Rng + ?Sized>(
    state: &StateVector,
    qubits: &[usize],
    shots: u64,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let probs = state.marginal(qubits)?;
    let counts = multinomial(&probs, shots, rng)?;
    let width = qubits.len();
    let outcome_counts = counts
        .into_iter()
        .enumerate()
        .filter(|&(_, n)| n > 0)
        .map(|(k, n)| (format!("{k:0width$b}"), n))
        .collect();
    Ok(MeasurementRecord {
        outcome_counts,
        total_shots: shots,
    })
}

pub(crate) fn multinomial<R: Rng + ?Sized>(probs: &[f64], n: u64, rng: &mut R) -> Result<Vec<u64>> {
    let mut counts = vec![0; probs.len()];
    let mut remaining = n;
    let mut mass = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == probs.len() - 1 {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = binomial(remaining, q, rng)?;
        counts[i] = k;
        remaining -= k;
        mass -= p;
    }
    Ok(counts)
}

pub(crate) fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> Result<u64> {
    let dist = Binomial::new(n, p.clamp(0.0, 1.0))
        .map_err(|e| Error::Numerical(format!("binomial({n}, {p}): {e}")))?;
    Ok(dist.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{apply_gate, GateOp};
    use crate::rng::rng_from_seed;

    #[test]
    fn ground_state_always_reads_zero() {
        let s = StateVector::zero(1).unwrap();
        let rec = sample_shots(&s, &[0], 100, &mut rng_from_seed(0)).unwrap();
        assert_eq!(rec.outcome_counts.len(), 1);
        assert_eq!(rec.count("0"), 100);
        assert_eq!(rec.total_shots, 100);
    }

    #[test]
    fn plus_state_is_balanced_within_three_sigma() {
        let s = apply_gate(&StateVector::zero(1).unwrap(), &GateOp::h(0)).unwrap();
        let rec = sample_shots(&s, &[0], 10_000, &mut rng_from_seed(5)).unwrap();
        let sigma = (10_000.0f64 * 0.25).sqrt();
        assert!((rec.count("0") as f64 - 5000.0).abs() <= 3.0 * sigma);
        assert_eq!(rec.count("0") + rec.count("1"), 10_000);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let mut s = StateVector::zero(3).unwrap();
        for q in 0..3 {
            s.apply(&GateOp::ry(q, 0.4 + q as f64)).unwrap();
        }
        let a = sample_shots(&s, &[0, 2], 999, &mut rng_from_seed(3)).unwrap();
        let b = sample_shots(&s, &[0, 2], 999, &mut rng_from_seed(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.outcome_counts.values().sum::<u64>(), 999);
    }

    #[test]
    fn zero_shots_rejected() {
        let s = StateVector::zero(1).unwrap();
        assert!(sample_shots(&s, &[0], 0, &mut rng_from_seed(0)).is_err());
    }
}
