//! Config resolution and report output shared by all commands.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// JSON file with configuration values; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl CommonArgs {
    /// Defaults overlaid with the `--config` file, if any.
    pub fn load<C: DeserializeOwned + Default>(&self) -> anyhow::Result<C> {
        match &self.config {
            None => Ok(C::default()),
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
            }
        }
    }

    /// Writes `{schema_version, command, config, result}`.
    pub fn emit<C: Serialize, R: Serialize>(&self, command: &str, config: &C, result: &R) -> anyhow::Result<()> {
        let body = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "config": config,
            "result": result,
        });
        let text = serde_json::to_string_pretty(&body)? + "\n";
        match &self.report {
            Some(path) => write_file(path, text.as_bytes()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn read_file(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Replaces `target` when the flag was given.
pub fn set<T>(target: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *target = v;
    }
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<Vec<u8>> {
    Ok((serde_json::to_string_pretty(value)? + "\n").into_bytes())
}
