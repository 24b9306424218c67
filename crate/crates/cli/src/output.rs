//! Atomic output files.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::run::RunOutcome;
use crate::CliError;

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// `report.json`, `metadata.json` and the CSV tables. Returns the paths in
/// the order written.
pub fn write_outcome(dir: &Path, outcome: &RunOutcome) -> Result<Vec<PathBuf>, CliError> {
    let mut files = vec![
        ("report.json".to_string(), outcome.report.to_json() + "\n"),
        ("metadata.json".to_string(), serde_json::to_string_pretty(&outcome.metadata).expect("metadata serialises") + "\n"),
    ];
    files.extend(outcome.tables.iter().cloned());
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        write_atomic(&path, contents.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
