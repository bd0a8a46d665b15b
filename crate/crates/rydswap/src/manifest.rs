//! Run manifests: enough context to reproduce an output file.

use std::{
    path::{Path, PathBuf},
    time::Instant,
};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{error::CliError, format};

#[derive(Debug, Clone, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Fully resolved configuration, defaults filled in.
    pub config: serde_json::Value,
    pub inputs: Vec<InputHash>,
    pub version: String,
    pub seeds: Vec<u64>,
    pub wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Collects the manifest fields while a subcommand runs.
#[derive(Debug)]
pub struct ManifestBuilder {
    subcommand: String,
    inputs: Vec<InputHash>,
    seeds: Vec<u64>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn start(subcommand: &str) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            inputs: Vec::new(),
            seeds: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Read an input file, recording its hash.
    pub fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputHash {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes)
            .map_err(|_| CliError::input(format!("{} is not UTF-8", path.display())))
    }

    pub fn seed(&mut self, seed: u64) {
        self.seeds.push(seed);
    }

    pub fn finish(&self, config: serde_json::Value) -> RunManifest {
        RunManifest {
            subcommand: self.subcommand.clone(),
            config,
            inputs: self.inputs.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seeds: self.seeds.clone(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// `<file>.manifest.json` next to `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

pub fn write_sidecar(path: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    format::write_text(&sidecar_path(path), &format::to_json_string(manifest))
}
