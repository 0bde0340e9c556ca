use std::f64::consts::{PI, TAU};

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::measure::{Basis, TomogramRecord};
use super::BlochState;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub const MLE_RESTARTS: usize = 20;
const LIKELIHOOD_TOLERANCE: f64 = 1e-9;
const MAX_ITERS: u64 = 1000;
const SIMPLEX_STEP: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleEstimate {
    pub state: BlochState,
    pub log_likelihood: f64,
}

fn log_likelihood_at(record: &TomogramRecord, theta: f64, phi: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let r = [s * phi.cos(), s * phi.sin(), c];
    Basis::ALL
        .iter()
        .zip(r)
        .map(|(&b, rb)| {
            let n = record.counts(b);
            let term = |count: u64, p: f64| if count == 0 { 0.0 } else { count as f64 * p.max(f64::MIN_POSITIVE).ln() };
            term(n.plus, (1.0 + rb) / 2.0) + term(n.minus, (1.0 - rb) / 2.0)
        })
        .sum()
}

/// `Σ n log p` of the record under ideal Pauli measurements of `state`.
pub fn log_likelihood(record: &TomogramRecord, state: &BlochState) -> f64 {
    log_likelihood_at(record, state.theta, state.phi)
}

struct NegLogLikelihood<'a>(&'a TomogramRecord);

impl CostFunction for NegLogLikelihood<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(-log_likelihood_at(self.0, p[0], p[1]))
    }
}

/// Pure-state maximum-likelihood estimate from Nelder–Mead searches over
/// `(θ, φ)` started at `restarts` random points. The model assumes ideal
/// measurements whatever noise produced the record.
pub fn mle_reconstruct(record: &TomogramRecord, restarts: usize, seed: u64) -> Result<MleEstimate> {
    if Basis::ALL.iter().any(|&b| record.counts(b).total() == 0) {
        return Err(Error::invalid("tomogram needs counts in every basis"));
    }
    if restarts == 0 {
        return Err(Error::invalid("restarts must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..restarts {
        let start = vec![rng.random::<f64>() * PI, rng.random::<f64>() * TAU];
        let simplex = vec![
            start.clone(),
            vec![start[0] + SIMPLEX_STEP, start[1]],
            vec![start[0], start[1] + SIMPLEX_STEP],
        ];
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(LIKELIHOOD_TOLERANCE)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        let res = Executor::new(NegLogLikelihood(record), solver)
            .configure(|st| st.max_iters(MAX_ITERS))
            .run()
            .map_err(|e| Error::Numerical(e.to_string()))?;
        let state = res.state();
        if let Some(p) = state.get_best_param() {
            let cost = state.get_best_cost();
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, p.clone()));
            }
        }
    }
    let (cost, p) = best.ok_or_else(|| Error::Numerical("likelihood search returned no point".into()))?;
    if !cost.is_finite() {
        return Err(Error::Numerical("non-finite likelihood at optimum".into()));
    }
    Ok(MleEstimate { state: BlochState::new(p[0], p[1]), log_likelihood: -cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomo::{fidelity, sample_bloch_uniform};

    #[test]
    fn exact_counts_from_zero_state() {
        let rec = TomogramRecord::from_probabilities([0.5, 0.5, 1.0], 100_000);
        let est = mle_reconstruct(&rec, MLE_RESTARTS, 1).unwrap();
        assert!(est.state.theta < 1e-3, "{}", est.state.theta);
    }

    #[test]
    fn exact_counts_recover_general_states() {
        for (i, truth) in sample_bloch_uniform(20, 7).iter().enumerate() {
            let r = truth.vector();
            let rec = TomogramRecord::from_probabilities(r.map(|x| (1.0 + x) / 2.0), 1_000_000);
            let est = mle_reconstruct(&rec, MLE_RESTARTS, i as u64).unwrap();
            assert!(fidelity(&est.state, truth) > 1.0 - 1e-6);
        }
    }

    #[test]
    fn estimate_beats_random_probes() {
        let truth = BlochState::new(2.0, 4.0);
        let rec = super::super::simulate_measurements(&truth, &super::super::NoiseChannel::None, 3000, 3).unwrap();
        let est = mle_reconstruct(&rec, MLE_RESTARTS, 3).unwrap();
        for probe in sample_bloch_uniform(1000, 4) {
            assert!(est.log_likelihood >= log_likelihood(&rec, &probe) - 1e-9);
        }
    }

    #[test]
    fn empty_basis_rejected() {
        let mut rec = TomogramRecord::from_probabilities([0.5, 0.5, 0.5], 10);
        rec.y.plus = 0;
        rec.y.minus = 0;
        assert!(mle_reconstruct(&rec, MLE_RESTARTS, 0).is_err());
    }
}
