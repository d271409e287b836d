//! CSV output and the run manifest written beside it.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use pinchlink_core::montecarlo::PhaseRandomization;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config_file::RunConfig;
use crate::error::{AppError, AppResult};
use crate::sweep::{SweepRow, SweepSpec};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn write_csv(path: &Path, rows: &[SweepRow]) -> AppResult<()> {
    let err = |e: csv::Error| AppError::Write { path: path.into(), source: e.into() };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|source| AppError::Write { path: path.into(), source })
}

/// Everything that determines the contents of one CSV.
#[derive(Debug, Clone)]
pub struct RunInputs<'a> {
    pub tool: &'a str,
    pub version: &'a str,
    pub command: &'a str,
    pub label: &'a str,
    pub spec: &'a SweepSpec,
    pub seed: u64,
    pub trials: u64,
    pub phase_randomization: PhaseRandomization,
    pub config: &'a RunConfig,
}

impl RunInputs<'_> {
    /// SHA-256 over a canonical rendering of every input.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for part in [
            self.tool.to_string(),
            self.version.to_string(),
            self.command.to_string(),
            self.label.to_string(),
            toml::to_string(self.spec).expect("sweep spec serializes"),
            self.seed.to_string(),
            self.trials.to_string(),
            format!("{:?}", self.phase_randomization),
            self.config.to_toml(),
        ] {
            h.update((part.len() as u64).to_le_bytes());
            h.update(part.as_bytes());
        }
        format!("{:x}", h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub label: String,
    pub config_hash: String,
    pub seed: u64,
    pub trials: u64,
    pub mc_enabled: bool,
    pub phase_randomization: PhaseRandomization,
    /// Seconds since the Unix epoch.
    pub created_unix: u64,
    pub outputs: Vec<String>,
    /// Effective configuration, in config-file syntax.
    pub config: String,
}

impl RunManifest {
    pub fn new(inputs: &RunInputs<'_>, outputs: Vec<String>) -> Self {
        Self {
            tool: inputs.tool.into(),
            version: inputs.version.into(),
            command: inputs.command.into(),
            label: inputs.label.into(),
            config_hash: inputs.hash(),
            seed: inputs.seed,
            trials: inputs.trials,
            mc_enabled: inputs.spec.mc_enabled,
            phase_randomization: inputs.phase_randomization,
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            outputs,
            config: inputs.config.to_toml(),
        }
    }

    pub fn write(&self, path: &Path) -> AppResult<()> {
        let text = toml::to_string(self).expect("manifest serializes");
        fs::write(path, text).map_err(|source| AppError::Write { path: path.into(), source })
    }

    pub fn read(path: &Path) -> AppResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| AppError::Read { path: path.into(), source })?;
        toml::from_str(&text).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))
    }
}

/// Writes `<dir>/<label>.csv` and `<dir>/<label>.manifest.toml`, returning
/// both paths.
pub fn write_run(dir: &Path, inputs: &RunInputs<'_>, rows: &[SweepRow]) -> AppResult<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|source| AppError::Write { path: dir.into(), source })?;
    let csv_path = dir.join(format!("{}.csv", inputs.label));
    let manifest_path = dir.join(format!("{}.manifest.toml", inputs.label));
    write_csv(&csv_path, rows)?;
    let name = csv_path.file_name().expect("csv path has a file name").to_string_lossy().into_owned();
    RunManifest::new(inputs, vec![name]).write(&manifest_path)?;
    Ok((csv_path, manifest_path))
}
