//! Atomic artifact writes: a temp file in the target directory, then rename.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::report::RunReport;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(&target))?;
    tmp.as_file().sync_all().map_err(io_err(&target))?;
    tmp.persist(&target).map_err(|e| io_err(&target)(e.error))?;
    Ok(target)
}

/// Writes every table and `summary.json`; returns the written paths.
pub fn write_report(dir: &Path, report: &RunReport, seed: u64) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for t in &report.tables {
        let bytes = t.to_csv().map_err(|e| CliError::Io {
            path: t.file.to_string(),
            source: std::io::Error::other(e),
        })?;
        written.push(write_atomic(dir, t.file, &bytes)?);
    }
    let mut summary = serde_json::to_vec_pretty(&report.summary(seed)).expect("summary serializes");
    summary.push(b'\n');
    written.push(write_atomic(dir, "summary.json", &summary)?);
    Ok(written)
}
