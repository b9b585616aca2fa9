//! Provenance envelope and writers.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "holonoise";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the canonical JSON form of an effective configuration.
pub fn config_hash<C: Serialize>(config: &C) -> String {
    let canonical = serde_json::to_vec(config).expect("configuration serializes");
    Sha256::digest(&canonical)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, R> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub result: R,
}

impl<'a, R> Envelope<'a, R> {
    pub fn new(command: &'a str, seed: u64, config_hash: String, timestamp: Option<String>, result: R) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            seed,
            config_hash,
            timestamp,
            result,
        }
    }
}

/// Pretty JSON with a trailing newline. Struct fields keep declaration
/// order and maps are sorted, so output is byte-stable.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable result");
    s.push('\n');
    s
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
