//! Threshold-descent minimum finding built on Grover iterations.
//!
//! Each round prepares the uniform superposition over the index register,
//! applies `r` Grover iterations whose oracle marks every index with value
//! below the current threshold, and measures once. An improving measurement
//! lowers the threshold; otherwise the iteration cap `m` grows by `growth`
//! up to `⌈√N⌉` and `r` is redrawn uniformly from `0..=⌊m⌋`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{GateOp, StateVector};

/// Index registers wider than this are rejected.
pub const QMA_MAX_QUBITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QmaConfig {
    /// Round budget; `None` means `10·⌈√N⌉`.
    pub max_rounds: Option<usize>,
    /// Stop after this many consecutive non-improving rounds at the full
    /// iteration cap.
    pub stall_limit: usize,
    /// Multiplicative growth of the iteration cap after a failed round.
    pub growth: f64,
}

impl Default for QmaConfig {
    fn default() -> Self {
        QmaConfig {
            max_rounds: None,
            stall_limit: 5,
            growth: 8.0 / 7.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QmaResult {
    pub argmin_index: usize,
    pub min_value: f64,
    /// Strictly decreasing; starts with the value at the random start point.
    pub threshold_history: Vec<f64>,
    /// Grover iterations plus one classical evaluation per measured
    /// candidate (including the start point).
    pub oracle_calls: u64,
    pub rounds: usize,
}

/// Finds the index of the smallest entry of `table`.
pub fn qma_minimize<R: Rng + ?Sized>(
    table: &[f64],
    config: &QmaConfig,
    rng: &mut R,
) -> Result<QmaResult> {
    qma_minimize_masked(table, &[], config, rng)
}

/// Like [`qma_minimize`] but never returns an index listed in `excluded`.
/// Tables whose length is not a power of two are padded with entries that
/// the oracle never marks.
pub fn qma_minimize_masked<R: Rng + ?Sized>(
    table: &[f64],
    excluded: &[usize],
    config: &QmaConfig,
    rng: &mut R,
) -> Result<QmaResult> {
    if table.is_empty() {
        return Err(Error::Empty("objective table"));
    }
    if let Some(i) = table.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("objective entry {i} is not finite")));
    }
    let size = table.len().max(2).next_power_of_two();
    let num_qubits = size.trailing_zeros() as usize;
    if num_qubits > QMA_MAX_QUBITS {
        return Err(Error::invalid(format!(
            "table of {} entries exceeds {QMA_MAX_QUBITS} index qubits",
            table.len()
        )));
    }
    if !(config.growth > 1.0) {
        return Err(Error::invalid("growth factor must exceed 1"));
    }

    let mut values = vec![f64::INFINITY; size];
    values[..table.len()].copy_from_slice(table);
    for &i in excluded {
        if i < table.len() {
            values[i] = f64::INFINITY;
        }
    }
    let candidates: Vec<usize> = (0..table.len()).filter(|&i| values[i].is_finite()).collect();
    if candidates.is_empty() {
        return Err(Error::Empty("unmasked objective entries"));
    }

    let cap = (size as f64).sqrt().ceil();
    let max_rounds = config.max_rounds.unwrap_or(10 * cap as usize);

    let mut best = candidates[rng.random_range(0..candidates.len())];
    let mut threshold = values[best];
    let mut history = vec![threshold];
    let mut oracle_calls = 1u64;
    let mut m = 1.0f64;
    let mut stall = 0usize;
    let mut rounds = 0usize;

    while rounds < max_rounds {
        rounds += 1;
        let iterations = rng.random_range(0..=m.floor() as u64);
        let mut state = StateVector::zero(num_qubits)?;
        for q in 0..num_qubits {
            state.apply(&GateOp::h(q))?;
        }
        for _ in 0..iterations {
            state.phase_flip_where(|i| values[i] < threshold);
            state.invert_about_mean();
        }
        oracle_calls += iterations + 1;
        let measured = sample_index(&state.probabilities(), rng);
        if values[measured] < threshold {
            best = measured;
            threshold = values[measured];
            history.push(threshold);
            m = 1.0;
            stall = 0;
        } else {
            m = (m * config.growth).min(cap);
            if m >= cap {
                stall += 1;
                if stall >= config.stall_limit {
                    break;
                }
            }
        }
    }

    Ok(QmaResult {
        argmin_index: best,
        min_value: table[best],
        threshold_history: history,
        oracle_calls,
        rounds,
    })
}

/// Runs [`qma_minimize_masked`] `repetitions` times and keeps the best
/// result (ties resolved towards the smaller index). Oracle calls
/// accumulate across repetitions.
pub(crate) fn qma_best_of<R: Rng + ?Sized>(
    table: &[f64],
    excluded: &[usize],
    repetitions: u32,
    config: &QmaConfig,
    rng: &mut R,
) -> Result<QmaResult> {
    let mut best: Option<QmaResult> = None;
    let mut calls = 0;
    for _ in 0..repetitions.max(1) {
        let r = qma_minimize_masked(table, excluded, config, rng)?;
        calls += r.oracle_calls;
        let better = match &best {
            None => true,
            Some(b) => {
                r.min_value < b.min_value
                    || (r.min_value == b.min_value && r.argmin_index < b.argmin_index)
            }
        };
        if better {
            best = Some(r);
        }
    }
    let mut best = best.expect("at least one repetition");
    best.oracle_calls = calls;
    Ok(best)
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the accumulated mass
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn exhaustive_argmin(t: &[f64]) -> usize {
        let mut best = 0;
        for (i, &v) in t.iter().enumerate() {
            if v < t[best] {
                best = i;
            }
        }
        best
    }

    #[test]
    fn constant_table_keeps_start_point() {
        let table = [2.5; 8];
        let r = qma_minimize(&table, &QmaConfig::default(), &mut rng_from_seed(4)).unwrap();
        assert_eq!(r.threshold_history, vec![2.5]);
        assert_eq!(r.min_value, 2.5);
    }

    #[test]
    fn finds_unique_minimum_in_small_table() {
        let table = [4.0, 7.0, 3.0, 9.0, 5.0, -1.0, 8.0, 2.0];
        assert_eq!(exhaustive_argmin(&table), 5);
        let hits = (0..200)
            .filter(|&s| {
                qma_minimize(&table, &QmaConfig::default(), &mut rng_from_seed(s))
                    .unwrap()
                    .argmin_index
                    == 5
            })
            .count();
        assert!(hits >= 190, "hits = {hits}");
    }

    #[test]
    fn history_strictly_decreases_and_matches_result() {
        let mut rng = rng_from_seed(17);
        for _ in 0..50 {
            let table: Vec<f64> = (0..64).map(|_| rng.random_range(-10.0..10.0)).collect();
            let r = qma_minimize(&table, &QmaConfig::default(), &mut rng).unwrap();
            assert!(r.threshold_history.windows(2).all(|w| w[1] < w[0]));
            assert_eq!(r.min_value, table[r.argmin_index]);
            assert_eq!(*r.threshold_history.last().unwrap(), r.min_value);
            assert!(r.min_value <= r.threshold_history[0]);
        }
    }

    #[test]
    fn masked_and_padded_entries_are_never_returned() {
        let table = [0.0, 5.0, 1.0, 6.0, 7.0];
        let mut rng = rng_from_seed(2);
        for _ in 0..50 {
            let r = qma_minimize_masked(&table, &[0], &QmaConfig::default(), &mut rng).unwrap();
            assert_ne!(r.argmin_index, 0);
            assert!(r.argmin_index < table.len());
        }
        assert!(qma_minimize_masked(&[1.0], &[0], &QmaConfig::default(), &mut rng).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        let mut rng = rng_from_seed(0);
        assert!(matches!(
            qma_minimize(&[], &QmaConfig::default(), &mut rng),
            Err(Error::Empty(_))
        ));
        assert!(qma_minimize(&[1.0, f64::NAN], &QmaConfig::default(), &mut rng).is_err());
    }

    #[test]
    fn same_seed_same_run() {
        let table: Vec<f64> = (0..32).map(|i| ((i * 37) % 32) as f64).collect();
        let a = qma_minimize(&table, &QmaConfig::default(), &mut rng_from_seed(8)).unwrap();
        let b = qma_minimize(&table, &QmaConfig::default(), &mut rng_from_seed(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn best_of_accumulates_calls() {
        let table = [3.0, 1.0, 2.0, 0.5];
        let single = qma_minimize(&table, &QmaConfig::default(), &mut rng_from_seed(1)).unwrap();
        let multi = qma_best_of(&table, &[], 4, &QmaConfig::default(), &mut rng_from_seed(1)).unwrap();
        assert!(multi.oracle_calls >= single.oracle_calls);
        assert_eq!(multi.argmin_index, 3);
    }
}
