use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qmlkit::rng::derive_seed;
use qmlkit::tomo::{neurotomography_pipeline, NoiseChannel, TomoConfig};
use serde::{Deserialize, Serialize};

use super::usage;
use crate::report::{set, write_file, CommonArgs};

/// Seed stream for the random-unitary axis, kept apart from the pipeline's.
const AXIS_STREAM: u64 = 100;

#[derive(Clone, Copy, ValueEnum)]
enum NoiseKind {
    None,
    Systematic,
    Random,
    AmplitudePhase,
}

#[derive(Args)]
pub struct TomoArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Noise channel, with its default parameters
    #[arg(long, value_enum)]
    noise: Option<NoiseKind>,
    /// Rotation angle of the systematic channel (radians)
    #[arg(long, allow_negative_numbers = true)]
    angle: Option<f64>,
    /// Angle standard deviation of the random channel (radians)
    #[arg(long)]
    angle_std: Option<f64>,
    /// Unit rotation axis for unitary channels, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    axis: Option<Vec<f64>>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    train_count: Option<usize>,
    #[arg(long)]
    eval_count: Option<usize>,
    /// Shots per state, split evenly over the X, Y and Z bases
    #[arg(long)]
    sample_size: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Per-experiment CSV (true angles, MLE and network fidelities)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Per-epoch network training loss CSV
    #[arg(long)]
    loss_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TomoCliConfig {
    pipeline: TomoConfig,
    output: Option<PathBuf>,
    loss_out: Option<PathBuf>,
}

fn apply_noise_flags(noise: &mut NoiseChannel, args: &TomoArgs) -> anyhow::Result<()> {
    let axis = match &args.axis {
        Some(a) if a.len() == 3 => Some([a[0], a[1], a[2]]),
        Some(_) => return Err(usage("--axis needs three components")),
        None => None,
    };
    match noise {
        NoiseChannel::SystematicUnitary { axis: ax, angle } => {
            set(angle, args.angle);
            set(ax, axis);
        }
        NoiseChannel::RandomUnitary { axis: ax, angle_std } => {
            set(angle_std, args.angle_std);
            set(ax, axis);
        }
        NoiseChannel::AmplitudePhase { gamma, lambda } => {
            set(gamma, args.gamma);
            set(lambda, args.lambda);
        }
        NoiseChannel::None => {}
    }
    let stray = match noise {
        NoiseChannel::None => args.angle.is_some() || args.angle_std.is_some() || axis.is_some() || args.gamma.is_some() || args.lambda.is_some(),
        NoiseChannel::SystematicUnitary { .. } => args.angle_std.is_some() || args.gamma.is_some() || args.lambda.is_some(),
        NoiseChannel::RandomUnitary { .. } => args.angle.is_some() || args.gamma.is_some() || args.lambda.is_some(),
        NoiseChannel::AmplitudePhase { .. } => args.angle.is_some() || args.angle_std.is_some() || axis.is_some(),
    };
    if stray {
        return Err(usage(format!("noise parameter flag does not apply to channel `{}`", noise.name())));
    }
    noise.validate().map_err(|e| usage(e.to_string()))
}

pub fn run(args: TomoArgs) -> anyhow::Result<()> {
    let mut cfg: TomoCliConfig = args.common.load()?;
    let p = &mut cfg.pipeline;
    set(&mut p.train_count, args.train_count);
    set(&mut p.eval_count, args.eval_count);
    set(&mut p.sample_size, args.sample_size);
    set(&mut p.epochs, args.epochs);
    set(&mut p.learning_rate, args.learning_rate);
    set(&mut p.batch_size, args.batch_size);
    set(&mut p.seed, args.seed);
    if let Some(kind) = args.noise {
        p.noise = match kind {
            NoiseKind::None => NoiseChannel::None,
            NoiseKind::Systematic => NoiseChannel::default_systematic(),
            NoiseKind::Random => NoiseChannel::default_random(derive_seed(p.seed, AXIS_STREAM)),
            NoiseKind::AmplitudePhase => NoiseChannel::default_amplitude_phase(),
        };
    }
    apply_noise_flags(&mut p.noise, &args)?;
    set(&mut cfg.output, args.output.clone().map(Some));
    set(&mut cfg.loss_out, args.loss_out.clone().map(Some));

    let report = neurotomography_pipeline(&cfg.pipeline)?;
    if let Some(out) = &cfg.output {
        let mut buf = Vec::new();
        report.write_rows_csv(&mut buf)?;
        write_file(out, &buf)?;
    }
    if let Some(out) = &cfg.loss_out {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["epoch", "mse"])?;
        for (e, l) in report.training_loss.iter().enumerate() {
            w.write_record([e.to_string(), format!("{l:?}")])?;
        }
        write_file(out, &w.into_inner()?)?;
    }
    let result = serde_json::json!({
        "noise": report.config.noise,
        "mle_infidelity": report.mle,
        "network_infidelity": report.network,
        "network_better": report.network.median < report.mle.median,
        "final_training_mse": report.training_loss.last(),
    });
    args.common.emit("tomo-run", &cfg, &result)
}
