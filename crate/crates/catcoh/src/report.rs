//! Machine-readable reports: a stable envelope around per-command payloads.
//! Payloads are deterministic for identical inputs; wall-clock timing lives
//! outside the payload so byte comparison can ignore it.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub engine_version: String,
    pub inputs: Vec<InputHash>,
    pub payload: Value,
    pub timing_ms: u128,
}

pub fn hash_file(path: &Path) -> Result<InputHash> {
    let bytes = std::fs::read(path)?;
    let mut h = Sha256::new();
    h.update(&bytes);
    Ok(InputHash {
        path: path.display().to_string(),
        sha256: format!("{:x}", h.finalize()),
    })
}

pub fn report(command: &str, inputs: Vec<InputHash>, payload: Value, timing_ms: u128) -> Report {
    Report {
        command: command.to_string(),
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        inputs,
        payload,
        timing_ms,
    }
}
