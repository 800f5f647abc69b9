//! Reading inputs and writing outputs with path-aware errors.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Files written and warnings raised by one command.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
    /// Text printed to standard output instead of a file.
    pub stdout: String,
}

impl Outcome {
    pub fn write(&mut self, path: PathBuf, bytes: &[u8]) -> Result<(), CliError> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|source| CliError::Output {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        std::fs::write(&path, bytes).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn absorb(&mut self, other: Outcome) {
        self.written.extend(other.written);
        self.warnings.extend(other.warnings);
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))
}

/// Runs a writer into memory; failures there are programming errors in the
/// serializer, so they surface as computation failures.
pub fn render<E: Display>(
    what: &str,
    f: impl FnOnce(&mut Vec<u8>) -> Result<(), E>,
) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| CliError::computation(format!("rendering {what}"), e))?;
    Ok(buf)
}

/// Lower-cased header cells of the first non-comment line.
pub fn header_columns(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split(',')
                .map(|c| c.trim().to_ascii_lowercase())
                .collect()
        })
        .unwrap_or_default()
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".to_string())
}
