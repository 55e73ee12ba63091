use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{ExperimentConfig, ExperimentKind, DEFAULT_TOLERANCES};
use crate::error::Result;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
}

/// Run record: config echo, versions, tolerances, input hash and output hashes.
/// Contains no timestamps so reruns are byte-identical.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub kind: String,
    pub version: String,
    pub config: serde_json::Value,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub input_hash: String,
    pub outputs: Vec<OutputEntry>,
    pub notes: Vec<String>,
    pub summary: serde_json::Value,
}

/// Writes files into the output directory and remembers their hashes.
pub struct OutputSink {
    dir: PathBuf,
    outputs: Vec<OutputEntry>,
    inputs: Vec<u8>,
}

impl OutputSink {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), outputs: Vec::new(), inputs: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Adds bytes to the input hash (config text, loaded tables).
    pub fn record_input(&mut self, bytes: &[u8]) {
        self.inputs.extend_from_slice(bytes);
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.outputs.push(OutputEntry { file: name.to_string(), sha256: sha256_hex(bytes) });
        Ok(path)
    }

    pub fn outputs(&self) -> &[OutputEntry] {
        &self.outputs
    }

    pub fn finish(
        self,
        cfg: &ExperimentConfig,
        kind: ExperimentKind,
        notes: Vec<String>,
        summary: serde_json::Value,
    ) -> Result<Manifest> {
        let tolerances = DEFAULT_TOLERANCES.iter().map(|(k, _)| (k.to_string(), cfg.tolerance(k))).collect();
        let manifest = Manifest {
            kind: kind.name().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::to_value(cfg)?,
            tolerances,
            seed: cfg.seed,
            input_hash: sha256_hex(&self.inputs),
            outputs: self.outputs,
            notes,
            summary,
        };
        let text = serde_json::to_string_pretty(&manifest)?;
        fs::write(self.dir.join("manifest.json"), text)?;
        Ok(manifest)
    }
}
