//! Command-line experiments on top of `agq_core`: manifests, orchestration,
//! CSV and summary output, and a content-addressed result cache.

pub mod cache;
pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

pub use cache::{cache_key, Cache, CachedRun};
pub use config::{parse_config, ConfigDocument, ExperimentId, ExperimentManifest};
pub use error::{CliError, Result};
pub use experiments::run_experiment;
pub use report::ReportDocument;

/// Environment variable holding the default cache directory.
pub const CACHE_DIR_ENV: &str = "AGQ_CACHE_DIR";

/// Outputs of a run, fresh or from the cache.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub key: String,
    pub cache_hit: bool,
    pub result: CachedRun,
}

/// Serves the manifest from `cache` when possible, otherwise runs it and
/// stores the result.
pub fn execute(m: &ExperimentManifest, workers: usize, cache: Option<&Cache>) -> Result<RunOutput> {
    let key = cache_key(m);
    if let Some(hit) = cache.and_then(|c| c.load(&key)) {
        return Ok(RunOutput {
            key,
            cache_hit: true,
            result: hit,
        });
    }
    let report = run_experiment(m, workers)?;
    let result = CachedRun {
        csv: report.to_csv()?,
        summary: report.to_summary(),
        passed: report.passed(),
    };
    if let Some(c) = cache {
        c.store(&key, &result)?;
    }
    Ok(RunOutput {
        key,
        cache_hit: false,
        result,
    })
}

/// Writes `<experiment>.csv` and `<experiment>.summary.txt` into `dir`.
pub fn write_outputs(
    dir: &Path,
    experiment: ExperimentId,
    run: &CachedRun,
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let csv = dir.join(format!("{experiment}.csv"));
    let summary = dir.join(format!("{experiment}.summary.txt"));
    fs::write(&csv, &run.csv).map_err(|e| CliError::io(&csv, e))?;
    fs::write(&summary, &run.summary).map_err(|e| CliError::io(&summary, e))?;
    Ok((csv, summary))
}
