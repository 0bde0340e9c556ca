//! `qmlkit` command-line interface.
//!
//! Every command resolves its configuration from built-in defaults, an
//! optional `--config` JSON file and explicit flags (in increasing
//! priority), runs, and writes a JSON report embedding that configuration.
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmlkit::error::ErrorCategory;

use commands::{cluster, data, quantum, tomo, ttn};

#[derive(Parser)]
#[command(name = "qmlkit", version, about = "Quantum machine-learning experiments on a state-vector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a Gaussian-blob classification dataset
    GenBlobs(data::GenBlobsArgs),
    /// Write the bundled Iris dataset
    LoadIris(data::LoadIrisArgs),
    /// SWAP-test fidelity and distance estimates for two vectors
    SwapTest(quantum::SwapTestArgs),
    /// Grover minimum finding over a table
    Qma(quantum::QmaArgs),
    /// Classical and quantum k-nearest-neighbours classification
    Knn(cluster::KnnArgs),
    /// Classical and quantum k-means clustering
    Kmeans(cluster::KmeansArgs),
    /// Operation-count curves and crossover dimension
    Cost(cluster::CostArgs),
    /// Train a binary tree-tensor-network classifier
    TtnTrain(ttn::TrainArgs),
    /// Evaluate a saved binary classifier
    TtnEval(ttn::EvalArgs),
    /// Accuracy of a saved classifier versus measurement shots
    TtnShots(ttn::ShotsArgs),
    /// Train and evaluate multiclass classifiers over several seeds
    TtnMulti(ttn::MultiArgs),
    /// Compare network and maximum-likelihood tomography under noise
    TomoRun(tomo::TomoArgs),
}

/// Error raised for invalid command-line input or configuration.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn category(err: &anyhow::Error) -> ErrorCategory {
    for cause in err.chain() {
        if cause.is::<UsageError>() || cause.is::<serde_json::Error>() {
            return ErrorCategory::Usage;
        }
        if let Some(e) = cause.downcast_ref::<qmlkit::Error>() {
            return e.category();
        }
        if cause.is::<std::io::Error>() {
            return ErrorCategory::Data;
        }
    }
    ErrorCategory::Data
}

fn exit_code(cat: ErrorCategory) -> u8 {
    match cat {
        ErrorCategory::Usage => 2,
        ErrorCategory::Data => 3,
        ErrorCategory::Numerical => 4,
    }
}

fn category_name(cat: ErrorCategory) -> &'static str {
    match cat {
        ErrorCategory::Usage => "usage",
        ErrorCategory::Data => "data",
        ErrorCategory::Numerical => "numerical",
    }
}

/// One JSON line on stderr that scripts can parse.
fn emit_error(cat: ErrorCategory, message: &str) -> ExitCode {
    let line = serde_json::json!({
        "error": { "kind": category_name(cat), "exit_code": exit_code(cat), "message": message }
    });
    eprintln!("{line}");
    ExitCode::from(exit_code(cat))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::GenBlobs(a) => data::gen_blobs(a),
        Command::LoadIris(a) => data::load_iris(a),
        Command::SwapTest(a) => quantum::swap_test(a),
        Command::Qma(a) => quantum::qma(a),
        Command::Knn(a) => cluster::knn(a),
        Command::Kmeans(a) => cluster::kmeans(a),
        Command::Cost(a) => cluster::cost(a),
        Command::TtnTrain(a) => ttn::train(a),
        Command::TtnEval(a) => ttn::eval(a),
        Command::TtnShots(a) => ttn::shots(a),
        Command::TtnMulti(a) => ttn::multi(a),
        Command::TomoRun(a) => tomo::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let first = e.to_string().lines().next().unwrap_or_default().to_string();
            return emit_error(ErrorCategory::Usage, &first);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => emit_error(category(&err), &format!("{err:#}")),
    }
}
