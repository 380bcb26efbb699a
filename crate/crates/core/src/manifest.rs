//! Run manifests: everything needed to repeat a CLI run.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::contagion::Mode;
use crate::error::Result;

/// Every setting that influences outputs, with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub balance: PathBuf,
    pub exposures: Option<PathBuf>,
    pub alpha: f64,
    pub alphas: Vec<f64>,
    pub density: f64,
    pub ensemble: usize,
    pub seed: u64,
    pub ras_tol: f64,
    pub ras_max_iter: usize,
    pub tol: f64,
    pub max_steps: Option<usize>,
    pub mode: Mode,
    pub trace: bool,
    pub spectral_tol: f64,
    pub spectral_max_iter: usize,
}

/// Partial configuration as read from a config file; missing keys fall back to defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub balance: Option<PathBuf>,
    pub exposures: Option<PathBuf>,
    pub alpha: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub density: Option<f64>,
    pub ensemble: Option<usize>,
    pub seed: Option<u64>,
    pub ras_tol: Option<f64>,
    pub ras_max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub max_steps: Option<usize>,
    pub mode: Option<Mode>,
    pub trace: Option<bool>,
    pub spectral_tol: Option<f64>,
    pub spectral_max_iter: Option<usize>,
}

impl ConfigFile {
    /// Reads either a bare config object or a [`RunManifest`] (its `config` member).
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let cfg = match value.get("config") {
            Some(inner) if value.get("tool").is_some() => inner.clone(),
            _ => value,
        };
        Ok(serde_json::from_value(cfg)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(role: &str, path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        Ok(Self {
            role: role.to_string(),
            path: path.to_path_buf(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub config: ResolvedConfig,
    pub seed: u64,
    /// Worker cap in effect; does not affect outputs.
    pub threads: Option<usize>,
    pub timestamp: String,
    /// Files written next to the manifest.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: ResolvedConfig, threads: Option<usize>) -> Result<Self> {
        let mut inputs = vec![InputDigest::of("balance", &config.balance)?];
        if let Some(p) = &config.exposures {
            inputs.push(InputDigest::of("exposures", p)?);
        }
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs,
            seed: config.seed,
            config,
            threads,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            outputs: Vec::new(),
        })
    }
}
