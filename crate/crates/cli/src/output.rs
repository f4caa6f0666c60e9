//! Workspace layout and atomic file writes.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Writes `contents` to a sibling temp file, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Paths under the `--out` directory.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn series_dir(&self) -> PathBuf {
        self.root.join("series")
    }

    pub fn series_file(&self, symbol: &str) -> PathBuf {
        self.series_dir().join(format!("{symbol}.csv"))
    }

    pub fn models_dir(&self) -> PathBuf {
        self.root.join("models")
    }

    pub fn model_file(&self, model: &str, symbol: &str) -> PathBuf {
        self.models_dir().join(format!("{model}_{symbol}.txt"))
    }

    pub fn plots_dir(&self) -> PathBuf {
        self.root.join("plots")
    }

    pub fn forecast_dir(&self) -> PathBuf {
        self.root.join("forecast")
    }

    pub fn tune_dir(&self) -> PathBuf {
        self.root.join("tune")
    }

    pub fn report_json(&self) -> PathBuf {
        self.root.join("report.json")
    }

    pub fn report_csv(&self) -> PathBuf {
        self.root.join("report.csv")
    }

    pub fn sentiment_file(&self) -> PathBuf {
        self.root.join("sentiment.csv")
    }

    /// The resolved config each command writes next to its outputs.
    pub fn resolved_config(&self, command: &str) -> PathBuf {
        self.root.join(format!("{command}.conf"))
    }

    /// Symbols with an ingested series, sorted.
    pub fn ingested_symbols(&self) -> Result<Vec<String>, CliError> {
        let dir = self.series_dir();
        let entries = match fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(CliError::io(&dir, e)),
        };
        let mut symbols = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| CliError::io(&dir, e))?.path();
            if path.extension().is_some_and(|x| x == "csv") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    if !stem.starts_with('.') {
                        symbols.push(stem.to_string());
                    }
                }
            }
        }
        symbols.sort();
        Ok(symbols)
    }
}
