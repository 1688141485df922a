//! Run manifests: a JSON record written next to every simulation output
//! with everything needed to reproduce it byte-for-byte.

use std::path::Path;

use adv2e_core::SimConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Input manifest path as given on the command line.
    pub input_manifest: String,
    /// SHA-256 of the input manifest file contents, hex.
    pub input_sha256: String,
    /// Fully resolved configuration, defaults and overrides applied.
    pub config: SimConfig,
    pub seed: u64,
    pub threads: usize,
    pub format: String,
    pub output_events: String,
    pub event_count: u64,
    /// Largest filter coefficient seen during the run.
    pub max_alpha: f64,
    /// Filter updates where the coefficient exceeded 1 (under-sampled).
    pub alpha_warnings: u64,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn tool_version() -> String {
        env!("CARGO_PKG_VERSION").to_string()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Path of the manifest written alongside an event file.
    pub fn path_for(output: &Path) -> std::path::PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".run.json");
        output.with_file_name(name)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
