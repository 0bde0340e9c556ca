use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, ValueEnum};
use qmlkit::dataset::LabeledDataset;
use qmlkit::qcluster::ConfusionMatrix;
use qmlkit::ttn::{
    accuracy, multiclass_train, shot_accuracy_curve, ttn_train, EpochLoss, MulticlassTtnModel, TrainConfig, TtnModel,
};
use serde::{Deserialize, Serialize};

use super::{labeled_or_iris, usage};
use crate::report::{read_file, set, to_json, write_file, CommonArgs, SCHEMA_VERSION};

pub const DEFAULT_SHOT_GRID: [u64; 8] = [1, 3, 5, 9, 21, 55, 201, 1001];

/// Training hyperparameter flags.
#[derive(Args)]
struct HyperArgs {
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
}

impl HyperArgs {
    fn apply(self, t: &mut TrainConfig) {
        set(&mut t.learning_rate, self.learning_rate);
        set(&mut t.batch_size, self.batch_size);
        set(&mut t.epochs, self.epochs);
        set(&mut t.train_fraction, self.train_fraction);
    }
}

/// Saved binary model plus what is needed to rebuild its data split.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    data: Option<PathBuf>,
    classes: Vec<usize>,
    training: TrainConfig,
    model: TtnModel,
}

impl ModelFile {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let f: ModelFile = serde_json::from_str(&read_file(path)?)
            .with_context(|| format!("parsing model {}", path.display()))?;
        if f.schema_version != SCHEMA_VERSION {
            return Err(usage(format!("unsupported model schema_version {}", f.schema_version)));
        }
        f.model.validate()?;
        Ok(f)
    }
}

fn select(data: Option<&Path>, classes: &[usize]) -> anyhow::Result<LabeledDataset> {
    Ok(labeled_or_iris(data)?.select_classes(classes)?)
}

fn loss_csv(history: &[EpochLoss]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in history {
        w.serialize(e)?;
    }
    Ok(w.into_inner()?)
}

#[derive(Args)]
pub struct TrainArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Labelled CSV; the bundled Iris data when absent
    #[arg(long)]
    data: Option<PathBuf>,
    /// The two class ids to separate, comma separated (first becomes label 0)
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<usize>>,
    #[command(flatten)]
    hyper: HyperArgs,
    #[arg(long)]
    seed: Option<u64>,
    /// Model JSON output
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// Per-epoch loss CSV output
    #[arg(long)]
    loss_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TrainCliConfig {
    data: Option<PathBuf>,
    classes: Vec<usize>,
    training: TrainConfig,
    model_out: Option<PathBuf>,
    loss_out: Option<PathBuf>,
}

impl Default for TrainCliConfig {
    fn default() -> Self {
        TrainCliConfig {
            data: None,
            classes: vec![0, 1],
            training: TrainConfig::default(),
            model_out: None,
            loss_out: None,
        }
    }
}

pub fn train(args: TrainArgs) -> anyhow::Result<()> {
    let mut cfg: TrainCliConfig = args.common.load()?;
    set(&mut cfg.data, args.data.map(Some));
    set(&mut cfg.classes, args.classes);
    set(&mut cfg.training.seed, args.seed);
    set(&mut cfg.model_out, args.model_out.map(Some));
    set(&mut cfg.loss_out, args.loss_out.map(Some));
    args.hyper.apply(&mut cfg.training);
    if cfg.classes.len() != 2 {
        return Err(usage("binary training needs exactly two classes"));
    }

    let data = select(cfg.data.as_deref(), &cfg.classes)?;
    let (train_set, test_set) = cfg.training.split(&data)?;
    let out = ttn_train(&train_set, &cfg.training)?;
    if let Some(p) = &cfg.model_out {
        let file = ModelFile {
            schema_version: SCHEMA_VERSION,
            data: cfg.data.clone(),
            classes: cfg.classes.clone(),
            training: cfg.training.clone(),
            model: out.model.clone(),
        };
        write_file(p, &to_json(&file)?)?;
    }
    if let Some(p) = &cfg.loss_out {
        write_file(p, &loss_csv(&out.loss_history)?)?;
    }
    let result = serde_json::json!({
        "train_rows": train_set.len(),
        "test_rows": test_set.len(),
        "train_accuracy": accuracy(&out.model, &train_set)?,
        "test_accuracy": accuracy(&out.model, &test_set)?,
        "loss_history": out.loss_history,
        "model": out.model,
    });
    args.common.emit("ttn-train", &cfg, &result)
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Split {
    Train,
    Test,
    All,
}

fn split_rows(file: &ModelFile, data_override: Option<&Path>, split: Split) -> anyhow::Result<LabeledDataset> {
    let data = select(data_override.or(file.data.as_deref()), &file.classes)?;
    Ok(match split {
        Split::All => data,
        Split::Train => file.training.split(&data)?.0,
        Split::Test => file.training.split(&data)?.1,
    })
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Model JSON written by ttn-train
    #[arg(long)]
    model: Option<PathBuf>,
    /// Override the dataset recorded in the model file
    #[arg(long)]
    data: Option<PathBuf>,
    /// Rows to evaluate, re-deriving the training split from the model file
    #[arg(long, value_enum)]
    split: Option<Split>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EvalConfig {
    model: Option<PathBuf>,
    data: Option<PathBuf>,
    split: Split,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { model: None, data: None, split: Split::Test }
    }
}

pub fn eval(args: EvalArgs) -> anyhow::Result<()> {
    let mut cfg: EvalConfig = args.common.load()?;
    set(&mut cfg.model, args.model.map(Some));
    set(&mut cfg.data, args.data.map(Some));
    set(&mut cfg.split, args.split);
    let path = cfg.model.clone().ok_or_else(|| usage("--model is required"))?;
    let file = ModelFile::load(&path)?;
    let rows = split_rows(&file, cfg.data.as_deref(), cfg.split)?;
    let preds: Vec<usize> = rows.vectors.iter().map(|x| file.model.predict(x)).collect::<Result<_, _>>()?;
    let confusion = ConfusionMatrix::from_labels(&rows.labels, &preds, 2)?;
    let result = serde_json::json!({
        "rows": rows.len(),
        "accuracy": confusion.accuracy(),
        "confusion": confusion,
        "seed": file.training.seed,
    });
    args.common.emit("ttn-eval", &cfg, &result)
}

#[derive(Args)]
pub struct ShotsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    split: Option<Split>,
    /// Odd shot counts, comma separated
    #[arg(long, value_delimiter = ',')]
    shots: Option<Vec<u64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ShotsConfig {
    model: Option<PathBuf>,
    data: Option<PathBuf>,
    split: Split,
    shots: Vec<u64>,
    trials: usize,
    seed: u64,
}

impl Default for ShotsConfig {
    fn default() -> Self {
        ShotsConfig { model: None, data: None, split: Split::Test, shots: DEFAULT_SHOT_GRID.to_vec(), trials: 50, seed: 0 }
    }
}

pub fn shots(args: ShotsArgs) -> anyhow::Result<()> {
    let mut cfg: ShotsConfig = args.common.load()?;
    set(&mut cfg.model, args.model.map(Some));
    set(&mut cfg.data, args.data.map(Some));
    set(&mut cfg.split, args.split);
    set(&mut cfg.shots, args.shots);
    set(&mut cfg.trials, args.trials);
    set(&mut cfg.seed, args.seed);
    let path = cfg.model.clone().ok_or_else(|| usage("--model is required"))?;
    let file = ModelFile::load(&path)?;
    let rows = split_rows(&file, cfg.data.as_deref(), cfg.split)?;
    let curve = shot_accuracy_curve(&file.model, &rows, &cfg.shots, cfg.trials, cfg.seed)?;
    let result = serde_json::json!({
        "rows": rows.len(),
        "exact_accuracy": accuracy(&file.model, &rows)?,
        "curve": curve,
    });
    args.common.emit("ttn-shots", &cfg, &result)
}

#[derive(Args)]
pub struct MultiArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Class ids to use, comma separated; all classes when absent
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<usize>>,
    /// Training seeds, comma separated
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Model JSON (one entry per seed)
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MultiConfig {
    data: Option<PathBuf>,
    classes: Option<Vec<usize>>,
    seeds: Vec<u64>,
    training: TrainConfig,
    model_out: Option<PathBuf>,
}

impl Default for MultiConfig {
    fn default() -> Self {
        MultiConfig { data: None, classes: None, seeds: (0..5).collect(), training: TrainConfig::default(), model_out: None }
    }
}

#[derive(Serialize)]
struct SeedRun {
    seed: u64,
    test_accuracy: f64,
    confusion_normalized: ConfusionMatrix,
    final_loss: EpochLoss,
}

pub fn multi(args: MultiArgs) -> anyhow::Result<()> {
    let mut cfg: MultiConfig = args.common.load()?;
    set(&mut cfg.data, args.data.map(Some));
    set(&mut cfg.classes, args.classes.map(Some));
    set(&mut cfg.seeds, args.seeds);
    set(&mut cfg.model_out, args.model_out.map(Some));
    args.hyper.apply(&mut cfg.training);
    if cfg.seeds.is_empty() {
        return Err(usage("at least one seed is required"));
    }
    let mut data = labeled_or_iris(cfg.data.as_deref())?;
    if let Some(c) = &cfg.classes {
        data = data.select_classes(c)?;
    }

    let mut runs = Vec::new();
    let mut models: Vec<MulticlassTtnModel> = Vec::new();
    for &seed in &cfg.seeds {
        let tc = TrainConfig { seed, ..cfg.training.clone() };
        let (train_set, test_set) = tc.split(&data)?;
        let out = multiclass_train(&train_set, &tc)?;
        let confusion = out.model.confusion(&test_set)?;
        runs.push(SeedRun {
            seed,
            test_accuracy: confusion.accuracy(),
            confusion_normalized: confusion.normalize(),
            final_loss: out.loss_history.last().cloned().expect("history starts with epoch 0"),
        });
        models.push(out.model);
    }
    let matrices: Vec<ConfusionMatrix> = runs.iter().map(|r| r.confusion_normalized.clone()).collect();
    let median = ConfusionMatrix::median(&matrices)?;
    if let Some(p) = &cfg.model_out {
        let body = serde_json::json!({ "schema_version": SCHEMA_VERSION, "seeds": cfg.seeds, "models": models });
        write_file(p, &to_json(&body)?)?;
    }
    let result = serde_json::json!({
        "median_confusion_normalized": median,
        "runs": runs,
    });
    args.common.emit("ttn-multi", &cfg, &result)
}
