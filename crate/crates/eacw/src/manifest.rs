//! Reproduction recipes: every CLI run records its command line, input
//! digests, solver configuration, seed, wall time and output digest, so a
//! result can be replayed and checked bit for bit.

use crate::error::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Arguments after the program name.
    pub command: Vec<String>,
    pub inputs: Vec<InputRecord>,
    pub seed: u64,
    pub wall_time_s: f64,
    /// SHA-256 of the bytes written to stdout.
    pub output_sha256: String,
    pub exit_code: i32,
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex_encode(&hasher.finalize())
}

pub fn digest_file(path: &Path) -> Result<InputRecord> {
    let bytes = std::fs::read(path)?;
    Ok(InputRecord {
        path: path.display().to_string(),
        sha256: digest_bytes(&bytes),
    })
}

fn hex_encode(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}
