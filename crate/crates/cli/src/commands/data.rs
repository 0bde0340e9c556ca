use std::path::PathBuf;

use clap::Args;
use qmlkit::dataset::{iris_csv, BlobSpec};
use serde::{Deserialize, Serialize};

use crate::report::{set, write_file, CommonArgs};

#[derive(Args)]
pub struct GenBlobsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    per_class: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    /// Distance of each cluster centre from the origin
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    std_dev: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GenBlobsConfig {
    blobs: BlobSpec,
    output: Option<PathBuf>,
}

pub fn gen_blobs(args: GenBlobsArgs) -> anyhow::Result<()> {
    let mut cfg: GenBlobsConfig = args.common.load()?;
    set(&mut cfg.blobs.classes, args.classes);
    set(&mut cfg.blobs.per_class, args.per_class);
    set(&mut cfg.blobs.dim, args.dim);
    set(&mut cfg.blobs.radius, args.radius);
    set(&mut cfg.blobs.std_dev, args.std_dev);
    set(&mut cfg.blobs.seed, args.seed);
    set(&mut cfg.output, args.output.map(Some));
    let output = cfg.output.clone().ok_or_else(|| super::usage("--output is required"))?;

    let data = cfg.blobs.generate()?;
    let mut buf = Vec::new();
    data.write_csv(&mut buf)?;
    write_file(&output, &buf)?;
    let result = serde_json::json!({
        "rows": data.len(),
        "dim": data.dim(),
        "class_count": data.class_count,
        "centers": cfg.blobs.centers(),
    });
    args.common.emit("gen-blobs", &cfg, &result)
}

#[derive(Args)]
pub struct LoadIrisArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct LoadIrisConfig {
    output: Option<PathBuf>,
}

pub fn load_iris(args: LoadIrisArgs) -> anyhow::Result<()> {
    let mut cfg: LoadIrisConfig = args.common.load()?;
    set(&mut cfg.output, args.output.map(Some));
    let output = cfg.output.clone().ok_or_else(|| super::usage("--output is required"))?;
    write_file(&output, iris_csv().as_bytes())?;
    let data = qmlkit::dataset::iris();
    let result = serde_json::json!({
        "rows": data.len(),
        "features": data.feature_names,
        "classes": qmlkit::dataset::IRIS_CLASSES,
    });
    args.common.emit("load-iris", &cfg, &result)
}
