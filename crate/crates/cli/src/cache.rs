//! On-disk result cache keyed by the manifest's canonical text and the
//! crate version.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::ExperimentManifest;
use crate::error::{CliError, Result};

/// Hex SHA-256 of the canonical manifest plus the crate version.
pub fn cache_key(m: &ExperimentManifest) -> String {
    let mut h = Sha256::new();
    h.update(m.canonical().as_bytes());
    h.update(concat!("agq ", env!("CARGO_PKG_VERSION")).as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Stored outputs of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachedRun {
    pub csv: String,
    pub summary: String,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn entry(&self, key: &str) -> PathBuf {
        self.dir.join(key)
    }

    /// `None` on a miss or an incomplete entry.
    pub fn load(&self, key: &str) -> Option<CachedRun> {
        let dir = self.entry(key);
        let csv = fs::read_to_string(dir.join("report.csv")).ok()?;
        let summary = fs::read_to_string(dir.join("summary.txt")).ok()?;
        let passed = match fs::read_to_string(dir.join("verdict")).ok()?.trim() {
            "pass" => true,
            "fail" => false,
            _ => return None,
        };
        Some(CachedRun {
            csv,
            summary,
            passed,
        })
    }

    /// Writes into a scratch directory first and renames it into place, so
    /// readers never see half an entry.
    pub fn store(&self, key: &str, run: &CachedRun) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let target = self.entry(key);
        let scratch = self.dir.join(format!(".{key}.{}", std::process::id()));
        fs::create_dir_all(&scratch).map_err(|e| CliError::io(&scratch, e))?;
        let verdict = if run.passed { "pass" } else { "fail" };
        for (name, body) in [
            ("report.csv", run.csv.as_str()),
            ("summary.txt", &run.summary),
            ("verdict", verdict),
        ] {
            let path = scratch.join(name);
            fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        }
        if target.exists() {
            // Another process stored the same key; its bytes are identical.
            let _ = fs::remove_dir_all(&scratch);
            return Ok(());
        }
        fs::rename(&scratch, &target).map_err(|e| CliError::io(&target, e))
    }
}
