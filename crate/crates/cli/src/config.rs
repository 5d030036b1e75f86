//! Settings layering: command-line flags, then `RACK_*` environment
//! variables (both resolved by clap), then the TOML config file, then
//! built-in defaults.

use std::path::{Path, PathBuf};

use apirec_core::{QueryTermMode, RankerConfig, StopWordList};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub stopwords_path: Option<PathBuf>,
    pub query_term_mode: Option<String>,
    pub delta: Option<usize>,
    pub gamma: Option<f64>,
    pub top_k: Option<usize>,
}

impl FileConfig {
    /// A relative `stopwords_path` is taken relative to the config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
        if let (Some(p), Some(dir)) = (&cfg.stopwords_path, path.parent()) {
            if p.is_relative() {
                cfg.stopwords_path = Some(dir.join(p));
            }
        }
        Ok(cfg)
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                require_exists(p, "config file")?;
                Self::load(p)
            }
            None => Ok(Self::default()),
        }
    }

    pub fn mode(&self) -> Result<Option<QueryTermMode>, CliError> {
        self.query_term_mode
            .as_deref()
            .map(|m| m.parse().map_err(|e: apirec_core::text::ParseModeError| CliError::Format(e.to_string())))
            .transpose()
    }
}

/// Flag or environment values; `None` when neither was given.
#[derive(Debug, Default, Clone)]
pub struct RankOverrides {
    pub delta: Option<usize>,
    pub gamma: Option<f64>,
    pub top_k: Option<usize>,
}

pub fn ranker_config(over: &RankOverrides, file: &FileConfig) -> Result<RankerConfig, CliError> {
    let d = RankerConfig::default();
    let cfg = RankerConfig {
        delta: over.delta.or(file.delta).unwrap_or(d.delta),
        gamma: over.gamma.or(file.gamma).unwrap_or(d.gamma),
        top_k: over.top_k.or(file.top_k).unwrap_or(d.top_k),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn query_mode(flag: Option<QueryTermMode>, file: &FileConfig) -> Result<QueryTermMode, CliError> {
    Ok(match flag {
        Some(m) => m,
        None => file.mode()?.unwrap_or_default(),
    })
}

pub fn stopwords(flag: Option<&Path>, file: &FileConfig) -> Result<StopWordList, CliError> {
    match flag.or(file.stopwords_path.as_deref()) {
        Some(p) => {
            require_exists(p, "stop-word file")?;
            Ok(StopWordList::from_file(p)?)
        }
        None => Ok(StopWordList::builtin()),
    }
}

/// Missing inputs are usage errors, reported before any work starts.
pub fn require_exists(path: &Path, what: &str) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{what} {} does not exist", path.display())))
    }
}
