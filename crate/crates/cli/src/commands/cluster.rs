use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qmlkit::dataset::LabeledDataset;
use qmlkit::qcluster::{
    adjusted_rand_index, cost_curve, find_crossover, kmeans_cluster, knn_classify, qkmeans_cluster,
    qknn_classify, Algorithm, ConfusionMatrix, CostModelParams, KMeansResult, QuantumSettings, Selection,
};
use qmlkit::qsim::Shots;
use qmlkit::qsub::QmaConfig;
use qmlkit::rng::child_rng;
use serde::{Deserialize, Serialize};

use super::{parse_shots, read_labeled, read_raw, usage};
use crate::report::{set, write_file, CommonArgs};

/// Quantum-subroutine flags shared by `knn` and `kmeans`.
#[derive(Args)]
struct QuantumArgs {
    /// SWAP-test shots per distance (`exact` for exact probabilities)
    #[arg(long, value_parser = parse_shots)]
    n_st: Option<Shots>,
    /// Grover minimum-search repetitions per selection (0 for exact argmin)
    #[arg(long)]
    n_qma: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct QuantumConfig {
    n_st: Shots,
    n_qma: u32,
    qma: QmaConfig,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        QuantumConfig { n_st: Shots::Exact, n_qma: 0, qma: QmaConfig::default() }
    }
}

impl QuantumConfig {
    fn apply(&mut self, args: QuantumArgs) {
        set(&mut self.n_st, args.n_st);
        set(&mut self.n_qma, args.n_qma);
    }

    fn settings(&self) -> QuantumSettings {
        QuantumSettings {
            swap_shots: self.n_st,
            selection: if self.n_qma == 0 {
                Selection::Exact
            } else {
                Selection::Grover { repetitions: self.n_qma }
            },
            qma: self.qma.clone(),
        }
    }
}

#[derive(Args)]
pub struct KnnArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Labelled training CSV (split by --train-fraction when --test is absent)
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(short, long)]
    k: Option<usize>,
    #[command(flatten)]
    quantum: QuantumArgs,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV of per-row predictions
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct KnnConfig {
    train: Option<PathBuf>,
    test: Option<PathBuf>,
    train_fraction: f64,
    k: usize,
    quantum: QuantumConfig,
    seed: u64,
    output: Option<PathBuf>,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig {
            train: None,
            test: None,
            train_fraction: 0.7,
            k: 3,
            quantum: QuantumConfig::default(),
            seed: 0,
            output: None,
        }
    }
}

#[derive(Serialize)]
struct ClassifierSummary {
    accuracy: f64,
    confusion: ConfusionMatrix,
    confusion_normalized: ConfusionMatrix,
}

impl ClassifierSummary {
    fn new(confusion: ConfusionMatrix) -> Self {
        ClassifierSummary { accuracy: confusion.accuracy(), confusion_normalized: confusion.normalize(), confusion }
    }
}

fn with_classes(d: LabeledDataset, class_count: usize) -> anyhow::Result<LabeledDataset> {
    Ok(LabeledDataset::new(d.feature_names, d.vectors, d.labels, class_count)?)
}

pub fn knn(args: KnnArgs) -> anyhow::Result<()> {
    let mut cfg: KnnConfig = args.common.load()?;
    set(&mut cfg.train, args.train.map(Some));
    set(&mut cfg.test, args.test.map(Some));
    set(&mut cfg.train_fraction, args.train_fraction);
    set(&mut cfg.k, args.k);
    set(&mut cfg.seed, args.seed);
    set(&mut cfg.output, args.output.map(Some));
    cfg.quantum.apply(args.quantum);

    let train_path = cfg.train.clone().ok_or_else(|| usage("--train is required"))?;
    let data = read_labeled(&train_path)?;
    let (train, test) = match &cfg.test {
        Some(p) => {
            let test = read_labeled(p)?;
            let cc = data.class_count.max(test.class_count);
            (with_classes(data, cc)?, with_classes(test, cc)?)
        }
        None => data.stratified_split(cfg.train_fraction, &mut child_rng(cfg.seed, 0))?,
    };

    let classical = knn_classify(&train, &test, cfg.k)?;
    let quantum = qknn_classify(&train, &test, cfg.k, &cfg.quantum.settings(), cfg.seed)?;
    let agreement = classical.predictions.iter().zip(&quantum.predictions).filter(|(a, b)| a == b).count()
        as f64
        / test.len() as f64;

    if let Some(out) = &cfg.output {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["row", "label", "classical", "quantum"])?;
        for i in 0..test.len() {
            w.write_record([
                i.to_string(),
                test.labels[i].to_string(),
                classical.predictions[i].to_string(),
                quantum.predictions[i].to_string(),
            ])?;
        }
        write_file(out, &w.into_inner()?)?;
    }
    let result = serde_json::json!({
        "train_rows": train.len(),
        "test_rows": test.len(),
        "classical": ClassifierSummary::new(classical.confusion),
        "quantum": ClassifierSummary::new(quantum.confusion),
        "prediction_agreement": agreement,
    });
    args.common.emit("knn", &cfg, &result)
}

#[derive(Args)]
pub struct KmeansArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// CSV to cluster; a label column, when filled, is used for scoring
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(short, long)]
    k: Option<usize>,
    #[command(flatten)]
    quantum: QuantumArgs,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV of per-row cluster assignments
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct KmeansConfig {
    data: Option<PathBuf>,
    k: usize,
    quantum: QuantumConfig,
    max_iters: usize,
    seed: u64,
    output: Option<PathBuf>,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        KmeansConfig { data: None, k: 4, quantum: QuantumConfig::default(), max_iters: 100, seed: 0, output: None }
    }
}

#[derive(Serialize)]
struct ClusterSummary {
    iterations: usize,
    converged: bool,
    objective_history: Vec<f64>,
    ari_vs_labels: Option<f64>,
}

fn summarize(r: &KMeansResult, labels: Option<&[usize]>) -> anyhow::Result<ClusterSummary> {
    Ok(ClusterSummary {
        iterations: r.iterations,
        converged: r.converged,
        objective_history: r.objective_history.clone(),
        ari_vs_labels: labels.map(|l| adjusted_rand_index(l, &r.assignments)).transpose()?,
    })
}

pub fn kmeans(args: KmeansArgs) -> anyhow::Result<()> {
    let mut cfg: KmeansConfig = args.common.load()?;
    set(&mut cfg.data, args.data.map(Some));
    set(&mut cfg.k, args.k);
    set(&mut cfg.max_iters, args.max_iters);
    set(&mut cfg.seed, args.seed);
    set(&mut cfg.output, args.output.map(Some));
    cfg.quantum.apply(args.quantum);

    let path = cfg.data.clone().ok_or_else(|| usage("--data is required"))?;
    let raw = read_raw(&path)?;
    let labels: Option<Vec<usize>> = raw.labels.iter().copied().collect();
    let classical = kmeans_cluster(&raw.vectors, cfg.k, cfg.seed, cfg.max_iters)?;
    let quantum = qkmeans_cluster(&raw.vectors, cfg.k, &cfg.quantum.settings(), cfg.seed, cfg.max_iters)?;

    if let Some(out) = &cfg.output {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["row", "classical", "quantum"])?;
        for (i, (a, b)) in classical.assignments.iter().zip(&quantum.assignments).enumerate() {
            w.write_record([i.to_string(), a.to_string(), b.to_string()])?;
        }
        write_file(out, &w.into_inner()?)?;
    }
    let result = serde_json::json!({
        "rows": raw.vectors.len(),
        "classical": summarize(&classical, labels.as_deref())?,
        "quantum": summarize(&quantum, labels.as_deref())?,
        "ari_quantum_vs_classical": adjusted_rand_index(&classical.assignments, &quantum.assignments)?,
        "identical_assignments": classical.assignments == quantum.assignments,
    });
    args.common.emit("kmeans", &cfg, &result)
}

#[derive(Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum AlgoArg {
    Knn,
    Kmeans,
}

#[derive(Args)]
pub struct CostArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,
    #[arg(long)]
    n_st: Option<u64>,
    #[arg(long)]
    n_qma: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(short, long)]
    k: Option<u64>,
    /// Largest dimension on the log-spaced curve
    #[arg(long)]
    d_max: Option<u64>,
    /// Curve points per decade
    #[arg(long)]
    points_per_decade: Option<u32>,
    /// CSV of the cost curve
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CostConfig {
    algo: AlgoArg,
    params: CostModelParams,
    d_max: u64,
    points_per_decade: u32,
    output: Option<PathBuf>,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            algo: AlgoArg::Knn,
            params: CostModelParams::default(),
            d_max: 1_000_000,
            points_per_decade: 10,
            output: None,
        }
    }
}

/// `1, …, d_max` on a log grid, deduplicated after rounding.
fn log_grid(d_max: u64, per_decade: u32) -> Vec<u64> {
    let steps = ((d_max as f64).log10() * per_decade as f64).ceil() as u32;
    let mut dims: Vec<u64> = (0..=steps)
        .map(|i| (10f64.powf(i as f64 / per_decade as f64).round() as u64).min(d_max))
        .collect();
    dims.dedup();
    dims
}

pub fn cost(args: CostArgs) -> anyhow::Result<()> {
    let mut cfg: CostConfig = args.common.load()?;
    set(&mut cfg.algo, args.algo);
    set(&mut cfg.params.n_st, args.n_st);
    set(&mut cfg.params.n_qma, args.n_qma);
    set(&mut cfg.params.n, args.n);
    set(&mut cfg.params.m, args.m);
    set(&mut cfg.params.k, args.k);
    set(&mut cfg.d_max, args.d_max);
    set(&mut cfg.points_per_decade, args.points_per_decade);
    set(&mut cfg.output, args.output.map(Some));
    if cfg.d_max < 2 || cfg.points_per_decade == 0 {
        return Err(usage("d_max must be at least 2 and points_per_decade positive"));
    }
    let algo = match cfg.algo {
        AlgoArg::Knn => Algorithm::Knn,
        AlgoArg::Kmeans => Algorithm::Kmeans,
    };
    let crossover = find_crossover(&cfg.params, algo)?;
    let curve = cost_curve(&cfg.params, algo, &log_grid(cfg.d_max, cfg.points_per_decade))?;
    if let Some(out) = &cfg.output {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &curve {
            w.serialize(p)?;
        }
        write_file(out, &w.into_inner()?)?;
    }
    let result = serde_json::json!({ "crossover_d": crossover, "curve": curve });
    args.common.emit("cost", &cfg, &result)
}
