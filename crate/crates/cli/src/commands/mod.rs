pub mod cluster;
pub mod data;
pub mod quantum;
pub mod tomo;
pub mod ttn;

use std::path::Path;

use qmlkit::dataset::{iris, read_table, LabeledDataset, RawTable};
use qmlkit::qsim::Shots;

use crate::report::read_file;
use crate::UsageError;

/// Parses `exact` or a positive shot count.
pub fn parse_shots(s: &str) -> Result<Shots, String> {
    if s.eq_ignore_ascii_case("exact") {
        return Ok(Shots::Exact);
    }
    match s.parse::<u64>() {
        Ok(0) | Err(_) => Err(format!("expected `exact` or a positive integer, got `{s}`")),
        Ok(n) => Ok(Shots::Finite(n)),
    }
}

pub fn read_raw(path: &Path) -> anyhow::Result<RawTable> {
    let text = read_file(path)?;
    Ok(read_table(text.as_bytes()).map_err(|e| anyhow::Error::new(e).context(format!("in {}", path.display())))?)
}

pub fn read_labeled(path: &Path) -> anyhow::Result<LabeledDataset> {
    let raw = read_raw(path)?;
    Ok(raw.into_labeled().map_err(|e| anyhow::Error::new(e).context(format!("in {}", path.display())))?)
}

/// The dataset at `path`, or the bundled Iris data.
pub fn labeled_or_iris(path: Option<&Path>) -> anyhow::Result<LabeledDataset> {
    match path {
        Some(p) => read_labeled(p),
        None => Ok(iris()),
    }
}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}
