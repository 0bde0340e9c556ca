//! Operation-count models for classical versus quantum KNN and k-means.
//!
//! | algorithm | classical     | quantum                         |
//! |-----------|---------------|---------------------------------|
//! | KNN       | n·m·(k + d)   | n·m·(k·n_QMA + n_ST·log₂ d)     |
//! | k-means   | k·n·d         | k·n·(n_QMA + n_ST·log₂ d)       |
//!
//! `n_ST` counts SWAP-test shots per distance and `n_QMA` minimum-search
//! repetitions per selection. The default constants place the KNN crossover
//! near d ≈ 4.7·10⁴.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModelParams {
    pub n_st: u64,
    pub n_qma: u64,
    /// Training-set (KNN) or dataset (k-means) size.
    pub n: u64,
    /// Test-set size; unused by k-means.
    pub m: u64,
    pub k: u64,
    pub d: u64,
}

impl Default for CostModelParams {
    fn default() -> Self {
        CostModelParams {
            n_st: 3000,
            n_qma: 30,
            n: 100,
            m: 100,
            k: 4,
            d: 2,
        }
    }
}

impl CostModelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("n_st", self.n_st),
            ("n_qma", self.n_qma),
            ("n", self.n),
            ("m", self.m),
            ("k", self.k),
            ("d", self.d),
        ];
        match fields.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(Error::invalid(format!("cost parameter {name} must be positive"))),
            None => Ok(()),
        }
    }

    pub fn with_d(self, d: u64) -> Self {
        CostModelParams { d, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Knn,
    Kmeans,
}

impl Algorithm {
    pub fn cost(self, params: &CostModelParams, mode: CostMode) -> f64 {
        match self {
            Algorithm::Knn => knn_cost(params, mode),
            Algorithm::Kmeans => kmeans_cost(params, mode),
        }
    }
}

fn log2(d: u64) -> f64 {
    (d as f64).log2()
}

pub fn knn_cost(p: &CostModelParams, mode: CostMode) -> f64 {
    let (n, m, k, d) = (p.n as f64, p.m as f64, p.k as f64, p.d as f64);
    match mode {
        CostMode::Classical => n * m * (k + d),
        CostMode::Quantum => n * m * (k * p.n_qma as f64 + p.n_st as f64 * log2(p.d)),
    }
}

pub fn kmeans_cost(p: &CostModelParams, mode: CostMode) -> f64 {
    let (n, k, d) = (p.n as f64, p.k as f64, p.d as f64);
    match mode {
        CostMode::Classical => k * n * d,
        CostMode::Quantum => k * n * (p.n_qma as f64 + p.n_st as f64 * log2(p.d)),
    }
}

/// Upper end of the crossover search.
pub const MAX_CROSSOVER_D: u64 = 1 << 60;

/// Smallest `d` from which the quantum cost stays strictly below the
/// classical cost for every larger `d` up to [`MAX_CROSSOVER_D`], or `None`
/// when the quantum model never wins in that range.
///
/// In both models `quantum − classical` is a positive multiple of
/// `c + n_ST·log₂ d − d`, which is concave with its peak at `d = n_ST/ln 2`.
/// Past the peak the gap only shrinks, so a binary search finds where it
/// turns negative.
pub fn find_crossover(params: &CostModelParams, algo: Algorithm) -> Result<Option<u64>> {
    params.validate()?;
    let gap = |d: u64| {
        let p = params.with_d(d);
        algo.cost(&p, CostMode::Quantum) - algo.cost(&p, CostMode::Classical)
    };

    let peak = params.n_st as f64 / std::f64::consts::LN_2;
    let below = (peak.floor() as u64).clamp(1, MAX_CROSSOVER_D);
    let above = (peak.ceil() as u64).clamp(1, MAX_CROSSOVER_D);
    // the gap rises up to `below`, so a negative maximum means the quantum
    // model wins everywhere
    if gap(below) < 0.0 && gap(above) < 0.0 {
        return Ok(Some(1));
    }
    if gap(MAX_CROSSOVER_D) >= 0.0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (above, MAX_CROSSOVER_D);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if gap(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostPoint {
    pub d: u64,
    pub classical: f64,
    pub quantum: f64,
}

pub fn cost_curve(params: &CostModelParams, algo: Algorithm, dims: &[u64]) -> Result<Vec<CostPoint>> {
    params.validate()?;
    dims.iter()
        .map(|&d| {
            let p = params.with_d(d);
            p.validate()?;
            Ok(CostPoint {
                d,
                classical: algo.cost(&p, CostMode::Classical),
                quantum: algo.cost(&p, CostMode::Quantum),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> CostModelParams {
        CostModelParams {
            n_st: 1,
            n_qma: 1,
            n: 1,
            m: 1,
            k: 1,
            d: 2,
        }
    }

    #[test]
    fn direct_formulas() {
        assert_eq!(knn_cost(&unit(), CostMode::Classical), 3.0);
        let p = CostModelParams { n: 3, m: 5, k: 2, d: 1024, ..unit() };
        // n_ST = n_QMA = 1 gives n·m·(k + log₂ d)
        assert_eq!(knn_cost(&p, CostMode::Quantum), 15.0 * (2.0 + 10.0));
        let p = CostModelParams { k: 1, n: 1, d: 8, ..unit() };
        assert_eq!(kmeans_cost(&p, CostMode::Classical), 8.0);
    }

    #[test]
    fn quantum_kmeans_cost_is_logarithmic() {
        let p = CostModelParams { n_st: 1_000_000, n_qma: 1, ..unit() };
        let ratio = kmeans_cost(&p.with_d(1 << 16), CostMode::Quantum)
            / kmeans_cost(&p.with_d(1 << 8), CostMode::Quantum);
        assert!((ratio - 2.0).abs() < 1e-5);
    }

    #[test]
    fn classical_wins_at_small_dimension() {
        let p = CostModelParams::default();
        for d in [2, 16, 1000] {
            let p = p.with_d(d);
            assert!(kmeans_cost(&p, CostMode::Classical) < kmeans_cost(&p, CostMode::Quantum));
            assert!(knn_cost(&p, CostMode::Classical) < knn_cost(&p, CostMode::Quantum));
        }
    }

    /// Linear scan, only feasible for small crossovers.
    fn scan(params: &CostModelParams, algo: Algorithm, limit: u64) -> Option<u64> {
        let neg = |d: u64| {
            let p = params.with_d(d);
            algo.cost(&p, CostMode::Quantum) < algo.cost(&p, CostMode::Classical)
        };
        let mut start = None;
        for d in 1..=limit {
            match (neg(d), start) {
                (true, None) => start = Some(d),
                (false, Some(_)) => start = None,
                _ => {}
            }
        }
        start
    }

    #[test]
    fn crossover_matches_linear_scan() {
        for (n_st, n_qma, k) in [(1, 1, 1), (1, 30, 4), (5, 2, 3), (20, 10, 8), (100, 1, 1), (300, 50, 2)] {
            let p = CostModelParams { n_st, n_qma, k, ..CostModelParams::default() };
            for algo in [Algorithm::Knn, Algorithm::Kmeans] {
                assert_eq!(
                    find_crossover(&p, algo).unwrap(),
                    scan(&p, algo, 20_000),
                    "{p:?} {algo:?}"
                );
            }
        }
    }

    #[test]
    fn single_shot_crossover_is_tiny() {
        let p = CostModelParams { n_st: 1, ..CostModelParams::default() };
        let d = find_crossover(&p, Algorithm::Knn).unwrap().unwrap();
        assert!(d < 200, "d = {d}");
    }

    #[test]
    fn default_constants_cross_near_fifty_thousand() {
        let d = find_crossover(&CostModelParams::default(), Algorithm::Knn).unwrap().unwrap();
        assert!((40_000..=60_000).contains(&d), "d = {d}");
    }

    #[test]
    fn crossover_grows_with_shots() {
        let base = CostModelParams::default();
        let mut last = 0;
        for n_st in [500, 1000, 2000, 4000, 8000] {
            let d = find_crossover(&CostModelParams { n_st, ..base }, Algorithm::Knn).unwrap().unwrap();
            assert!(d > last);
            last = d;
        }
    }

    #[test]
    fn zero_parameters_rejected() {
        let p = CostModelParams { n: 0, ..CostModelParams::default() };
        assert!(find_crossover(&p, Algorithm::Knn).is_err());
    }
}
