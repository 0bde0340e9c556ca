use clap::Args;
use qmlkit::encode::{amplitude_encode, FeatureVector};
use qmlkit::qsim::Shots;
use qmlkit::qsub::{distance_estimate, qma_minimize, swap_test as run_swap, QmaConfig};
use qmlkit::rng::{child_rng, derive_seed};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{parse_shots, usage};
use crate::report::{set, CommonArgs};

#[derive(Args)]
pub struct SwapTestArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// First vector, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    a: Option<Vec<f64>>,
    /// Second vector, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    b: Option<Vec<f64>>,
    /// `exact` or a shot count
    #[arg(long, value_parser = parse_shots)]
    shots: Option<Shots>,
    /// Independent repetitions of the estimate
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SwapTestConfig {
    a: Vec<f64>,
    b: Vec<f64>,
    shots: Shots,
    repetitions: usize,
    seed: u64,
}

impl Default for SwapTestConfig {
    fn default() -> Self {
        SwapTestConfig { a: vec![1.0, 0.0], b: vec![0.0, 1.0], shots: Shots::Exact, repetitions: 1, seed: 0 }
    }
}

pub fn swap_test(args: SwapTestArgs) -> anyhow::Result<()> {
    let mut cfg: SwapTestConfig = args.common.load()?;
    set(&mut cfg.a, args.a);
    set(&mut cfg.b, args.b);
    set(&mut cfg.shots, args.shots);
    set(&mut cfg.repetitions, args.repetitions);
    set(&mut cfg.seed, args.seed);
    if cfg.repetitions == 0 {
        return Err(usage("repetitions must be at least 1"));
    }
    let u = FeatureVector::new(cfg.a.clone())?;
    let v = FeatureVector::new(cfg.b.clone())?;
    let (sa, sb) = (amplitude_encode(&u)?, amplitude_encode(&v)?);
    let exact_fidelity = sa.fidelity(&sb)?;

    let mut fidelity = Vec::with_capacity(cfg.repetitions);
    let mut distance = Vec::with_capacity(cfg.repetitions);
    for rep in 0..cfg.repetitions {
        let mut rng = child_rng(cfg.seed, rep as u64);
        fidelity.push(run_swap(&sa, &sb, cfg.shots, &mut rng)?);
        distance.push(distance_estimate(&u, &v, cfg.shots, &mut rng)?);
    }
    let result = serde_json::json!({
        "exact_fidelity": exact_fidelity,
        "exact_p0": (1.0 + exact_fidelity) / 2.0,
        "exact_squared_distance": u.squared_distance(&v),
        "fidelity_estimates": fidelity,
        "distance_estimates": distance,
    });
    args.common.emit("swap-test", &cfg, &result)
}

#[derive(Args)]
pub struct QmaArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Objective table, comma separated; random tables are drawn when absent
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    table: Option<Vec<f64>>,
    /// Random tables have 2^qubits uniform entries
    #[arg(long)]
    qubits: Option<u32>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    max_rounds: Option<usize>,
    #[arg(long)]
    stall_limit: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct QmaCliConfig {
    table: Option<Vec<f64>>,
    qubits: u32,
    trials: usize,
    seed: u64,
    qma: QmaConfig,
}

impl Default for QmaCliConfig {
    fn default() -> Self {
        QmaCliConfig { table: None, qubits: 8, trials: 1, seed: 0, qma: QmaConfig::default() }
    }
}

#[derive(Serialize)]
struct QmaTrial {
    argmin_index: usize,
    min_value: f64,
    true_argmin: usize,
    success: bool,
    oracle_calls: u64,
    rounds: usize,
    thresholds: usize,
}

const TABLE_STREAM: u64 = 0;
const SEARCH_STREAM: u64 = 1;

pub fn qma(args: QmaArgs) -> anyhow::Result<()> {
    let mut cfg: QmaCliConfig = args.common.load()?;
    set(&mut cfg.table, args.table.map(Some));
    set(&mut cfg.qubits, args.qubits);
    set(&mut cfg.trials, args.trials);
    set(&mut cfg.seed, args.seed);
    set(&mut cfg.qma.max_rounds, args.max_rounds.map(Some));
    set(&mut cfg.qma.stall_limit, args.stall_limit);
    if cfg.trials == 0 {
        return Err(usage("trials must be at least 1"));
    }
    if cfg.table.is_none() && !(1..=16).contains(&cfg.qubits) {
        return Err(usage("qubits must lie in 1..=16"));
    }

    let mut trials = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials as u64 {
        let table = match &cfg.table {
            Some(tab) => tab.clone(),
            None => {
                let mut rng = child_rng(derive_seed(cfg.seed, TABLE_STREAM), t);
                (0..1usize << cfg.qubits).map(|_| rng.random::<f64>()).collect()
            }
        };
        let mut rng = child_rng(derive_seed(cfg.seed, SEARCH_STREAM), t);
        let res = qma_minimize(&table, &cfg.qma, &mut rng)?;
        let true_argmin = (0..table.len()).fold(0, |b, i| if table[i] < table[b] { i } else { b });
        trials.push(QmaTrial {
            argmin_index: res.argmin_index,
            min_value: res.min_value,
            true_argmin,
            success: table[res.argmin_index] == table[true_argmin],
            oracle_calls: res.oracle_calls,
            rounds: res.rounds,
            thresholds: res.threshold_history.len(),
        });
    }
    let n = trials.len() as f64;
    let size = cfg.table.as_ref().map_or(1usize << cfg.qubits, Vec::len) as f64;
    let mean_calls = trials.iter().map(|t| t.oracle_calls as f64).sum::<f64>() / n;
    let result = serde_json::json!({
        "success_rate": trials.iter().filter(|t| t.success).count() as f64 / n,
        "mean_oracle_calls": mean_calls,
        "mean_calls_per_sqrt_n": mean_calls / size.sqrt(),
        "trials": trials,
    });
    args.common.emit("qma", &cfg, &result)
}
