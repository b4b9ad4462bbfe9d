use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::io::{write_json, FormatError};

/// Written next to every output; rerunning `command` with `config` and
/// `seed` reproduces the other files byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub version: String,
    /// Seconds.
    pub wall_time: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: u64, elapsed: Duration) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time: elapsed.as_secs_f64(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<(), FormatError> {
        write_json(&dir.join("manifest.json"), self)
    }
}
