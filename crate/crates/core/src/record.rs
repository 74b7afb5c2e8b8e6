//! Run records written next to command outputs.
//!
//! A record holds everything needed to replay a run: the argument vector,
//! the resolved configuration and SHA-256 digests of every input file.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub duration_secs: f64,
}

/// A digest mismatch found while checking a record against the file system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigestMismatch {
    pub path: String,
    pub expected: String,
    pub found: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> Result<InputDigest> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

impl RunRecord {
    pub fn new(
        command_line: Vec<String>,
        config: serde_json::Value,
        inputs: &[PathBuf],
        outputs: &[PathBuf],
        duration: Duration,
    ) -> Result<Self> {
        Ok(Self {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command_line,
            config,
            inputs: inputs.iter().map(|p| digest_file(p)).collect::<Result<_>>()?,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            duration_secs: duration.as_secs_f64(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format("record", e.to_string()))
    }

    /// Re-hashes every input and lists those whose contents changed.
    pub fn check_inputs(&self) -> Result<Vec<DigestMismatch>> {
        let mut bad = Vec::new();
        for input in &self.inputs {
            let now = digest_file(Path::new(&input.path))?;
            if now.sha256 != input.sha256 {
                bad.push(DigestMismatch {
                    path: input.path.clone(),
                    expected: input.sha256.clone(),
                    found: now.sha256,
                });
            }
        }
        Ok(bad)
    }
}

/// `PREFIX.run.json` for an output `PREFIX.ext` (or `PREFIX`).
pub fn record_path(output: &Path) -> PathBuf {
    let stem = output.with_extension("");
    let mut name = stem.file_name().unwrap_or_default().to_os_string();
    name.push(".run.json");
    stem.with_file_name(name)
}
