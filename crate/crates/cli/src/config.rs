//! Flat `key = value` configuration files.
//!
//! Keys are the long flag names of a subcommand (`k-min`, `alpha`, ...);
//! underscores are accepted in place of dashes. Lines starting with `#` are
//! comments. A value given on the command line always wins over the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    path: PathBuf,
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::input(path, format!("line {}: expected `key = value`", i + 1))
            })?;
            let key = key.trim().replace('_', "-");
            if key.is_empty() {
                return Err(CliError::input(path, format!("line {}: empty key", i + 1)));
            }
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::input(
                    path,
                    format!("line {}: key `{key}` given twice", i + 1),
                ));
            }
        }
        Ok(Self {
            path: path.to_path_buf(),
            values,
        })
    }

    /// Rejects keys the subcommand does not understand, so typos surface.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        let unknown: Vec<&str> = self
            .values
            .keys()
            .map(String::as_str)
            .filter(|k| !allowed.contains(k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::input(
                &self.path,
                format!(
                    "unknown key(s) {}; expected one of {}",
                    unknown.join(", "),
                    allowed.join(", ")
                ),
            ))
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| CliError::input(&self.path, format!("key `{key}` = `{v}`: {e}")))
            })
            .transpose()
    }

    /// Comma-separated list value; empty items are dropped.
    pub fn list(&self, key: &str) -> Vec<String> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            })
            .unwrap_or_default()
    }
}

/// Command-line values layered over an optional config file.
pub struct Layered<'a> {
    file: Option<&'a ConfigFile>,
}

impl<'a> Layered<'a> {
    pub fn new(file: Option<&'a ConfigFile>) -> Self {
        Self { file }
    }

    pub fn opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match (flag, self.file) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(f)) => f.get(key),
            (None, None) => Ok(None),
        }
    }

    pub fn or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    /// A switch is on if given as a flag or set to `true` in the file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.opt(None::<bool>, key)?.unwrap_or(false))
    }

    /// Repeatable flag; the file's comma list is used only when no flag was given.
    pub fn list(&self, flags: Vec<String>, key: &str) -> Vec<String> {
        if !flags.is_empty() {
            return flags;
        }
        self.file.map(|f| f.list(key)).unwrap_or_default()
    }
}

/// Loads `--config` if given and checks its keys.
pub fn load_optional(
    path: Option<&Path>,
    allowed: &[&str],
) -> Result<Option<ConfigFile>, CliError> {
    path.map(|p| {
        let file = ConfigFile::load(p)?;
        file.check_keys(allowed)?;
        Ok(file)
    })
    .transpose()
}
