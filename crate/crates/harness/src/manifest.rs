//! Run manifests: everything needed to reproduce an output file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RawConfig;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// The merged configuration (file plus overrides) that produced the run.
    pub config: RawConfig,
    pub seeds: Vec<u64>,
    pub outputs: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, config: &RawConfig, seeds: &[u64]) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.clone(),
            seeds: seeds.to_vec(),
            outputs: Vec::new(),
            summary: serde_json::Value::Null,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// `<output>.manifest.json`.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}
