use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::engine::SimConfig;
use crate::error::{CoreError, Result};
use crate::rmat::RmatParams;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to repeat a command that wrote an output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments as given, program name first.
    pub argv: Vec<String>,
    /// Directory relative paths in `argv` are resolved against.
    pub cwd: PathBuf,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub config: Option<SimConfig>,
    pub rmat: Option<RmatParams>,
    /// One entry per run.
    pub seeds: Vec<u64>,
    /// `None` when the oracle check was skipped.
    pub verified: Option<bool>,
    pub tool_version: String,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
}

impl RunManifest {
    pub fn begin(command: &str, argv: &[String], cwd: PathBuf) -> Self {
        let now = Utc::now();
        RunManifest {
            command: command.to_owned(),
            argv: argv.to_vec(),
            cwd,
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: None,
            rmat: None,
            seeds: Vec::new(),
            verified: None,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            started_at: now,
            finished_at: now,
        }
    }

    /// Stamps the finish time and writes `manifest.json` into `dir`.
    pub fn finish(mut self, dir: &Path) -> Result<PathBuf> {
        self.finished_at = Utc::now();
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&self).map_err(|e| CoreError::Engine(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CoreError::Parse { line: e.line(), message: e.to_string() })
    }
}
