use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measure::{simulate_measurements, TomogramRecord};
use super::mle::{mle_reconstruct, MLE_RESTARTS};
use super::noise::NoiseChannel;
use super::{check_sample_size, fidelity, sample_bloch_uniform, BlochState};
use crate::error::{Error, Result};
use crate::mlp::{train, MlpModel, MlpTrainConfig};
use crate::rng::derive_seed;

const TRAIN_STATES: u64 = 0;
const TRAIN_SHOTS: u64 = 1;
const EVAL_STATES: u64 = 2;
const EVAL_SHOTS: u64 = 3;
const MLE_STARTS: u64 = 4;
const NET_INIT: u64 = 5;
const NET_TRAIN: u64 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TomoConfig {
    pub noise: NoiseChannel,
    pub train_count: usize,
    pub eval_count: usize,
    pub sample_size: u64,
    pub seed: u64,
    pub hidden_layers: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub mle_restarts: usize,
}

impl Default for TomoConfig {
    fn default() -> Self {
        TomoConfig {
            noise: NoiseChannel::None,
            train_count: 10_000,
            eval_count: 2000,
            sample_size: 100_000,
            seed: 0,
            hidden_layers: vec![64, 64],
            learning_rate: 1e-2,
            batch_size: 32,
            epochs: 100,
            mle_restarts: MLE_RESTARTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub true_theta: f64,
    pub true_phi: f64,
    pub mle_fidelity: f64,
    pub nn_fidelity: f64,
}

/// Summary of an infidelity (`1 − F`) distribution; quartiles use linear
/// interpolation between order statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfidelityStats {
    pub median: f64,
    pub mean: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

impl InfidelityStats {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("infidelity sample"));
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Ok(InfidelityStats {
            median: q(0.5),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            q1: q(0.25),
            q3: q(0.75),
            min: v[0],
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomoReport {
    pub config: TomoConfig,
    pub mle: InfidelityStats,
    pub network: InfidelityStats,
    pub training_loss: Vec<f64>,
    #[serde(skip)]
    pub rows: Vec<ExperimentRow>,
    #[serde(skip)]
    pub model: Option<MlpModel>,
}

impl TomoReport {
    pub fn write_rows_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for row in &self.rows {
            w.serialize(row).map_err(crate::dataset::csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Bloch vector predicted from the X/Y/Z `+` frequencies, normalised onto
/// the sphere.
pub fn network_estimate(model: &MlpModel, record: &TomogramRecord) -> Result<BlochState> {
    let out = model.forward(&record.frequencies())?;
    if out.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, actual: out.len() });
    }
    Ok(BlochState::from_vector([out[0], out[1], out[2]]))
}

fn records(states: &[BlochState], cfg: &TomoConfig, stream: u64) -> Result<Vec<TomogramRecord>> {
    let base = derive_seed(cfg.seed, stream);
    states
        .par_iter()
        .enumerate()
        .map(|(i, s)| simulate_measurements(s, &cfg.noise, cfg.sample_size, derive_seed(base, i as u64)))
        .collect()
}

/// Trains the network on simulated noisy tomograms of uniformly random
/// states, then compares network and MLE fidelities on fresh states.
pub fn neurotomography_pipeline(cfg: &TomoConfig) -> Result<TomoReport> {
    cfg.noise.validate()?;
    check_sample_size(cfg.sample_size)?;
    if cfg.train_count == 0 || cfg.eval_count == 0 {
        return Err(Error::invalid("train_count and eval_count must be positive"));
    }

    let train_states = sample_bloch_uniform(cfg.train_count, derive_seed(cfg.seed, TRAIN_STATES));
    let train_records = records(&train_states, cfg, TRAIN_SHOTS)?;
    let inputs: Vec<Vec<f64>> = train_records.iter().map(|r| r.frequencies().to_vec()).collect();
    let targets: Vec<Vec<f64>> = train_states.iter().map(|s| s.vector().to_vec()).collect();

    let mut sizes = vec![3];
    sizes.extend(&cfg.hidden_layers);
    sizes.push(3);
    let model = MlpModel::new(&sizes, derive_seed(cfg.seed, NET_INIT))?;
    let mlp_cfg = MlpTrainConfig {
        learning_rate: cfg.learning_rate,
        batch_size: cfg.batch_size,
        epochs: cfg.epochs,
        seed: derive_seed(cfg.seed, NET_TRAIN),
    };
    let trained = train(model, &inputs, &targets, &mlp_cfg)?;

    let eval_states = sample_bloch_uniform(cfg.eval_count, derive_seed(cfg.seed, EVAL_STATES));
    let eval_records = records(&eval_states, cfg, EVAL_SHOTS)?;
    let mle_base = derive_seed(cfg.seed, MLE_STARTS);
    let rows: Vec<ExperimentRow> = eval_states
        .par_iter()
        .zip(&eval_records)
        .enumerate()
        .map(|(i, (truth, rec))| {
            let mle = mle_reconstruct(rec, cfg.mle_restarts, derive_seed(mle_base, i as u64))?;
            let nn = network_estimate(&trained.model, rec)?;
            Ok(ExperimentRow {
                true_theta: truth.theta,
                true_phi: truth.phi,
                mle_fidelity: fidelity(truth, &mle.state),
                nn_fidelity: fidelity(truth, &nn),
            })
        })
        .collect::<Result<_>>()?;

    let mle_inf: Vec<f64> = rows.iter().map(|r| 1.0 - r.mle_fidelity).collect();
    let nn_inf: Vec<f64> = rows.iter().map(|r| 1.0 - r.nn_fidelity).collect();
    Ok(TomoReport {
        config: cfg.clone(),
        mle: InfidelityStats::from_values(&mle_inf)?,
        network: InfidelityStats::from_values(&nn_inf)?,
        training_loss: trained.loss_history,
        rows,
        model: Some(trained.model),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles_interpolate() {
        let s = InfidelityStats::from_values(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        assert_eq!(InfidelityStats::from_values(&[1.0, 2.0]).unwrap().median, 1.5);
    }

    #[test]
    fn small_pipeline_runs_and_is_deterministic() {
        let cfg = TomoConfig {
            train_count: 200,
            eval_count: 20,
            sample_size: 3000,
            epochs: 5,
            seed: 3,
            ..TomoConfig::default()
        };
        let a = neurotomography_pipeline(&cfg).unwrap();
        let b = neurotomography_pipeline(&cfg).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.rows.len(), 20);
        assert!(a.rows.iter().all(|r| (0.0..=1.0 + 1e-12).contains(&r.nn_fidelity)));
        assert!(a.training_loss.last() <= a.training_loss.first());
    }
}
