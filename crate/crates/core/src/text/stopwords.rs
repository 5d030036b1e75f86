use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

const BUILTIN: &str = include_str!("stopwords_en.txt");

#[derive(Debug, Error)]
pub enum StopWordError {
    #[error("cannot read stop-word file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("stop-word list from {0} is empty")]
    Empty(StopWordSource),
}

/// Where a stop-word list came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopWordSource {
    BuiltIn,
    File(PathBuf),
}

impl fmt::Display for StopWordSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopWordSource::BuiltIn => f.write_str("built-in list"),
            StopWordSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// A non-empty set of lowercase stop words with case-insensitive lookup.
#[derive(Debug, Clone)]
pub struct StopWordList {
    entries: HashSet<String>,
    source: StopWordSource,
}

impl StopWordList {
    /// The bundled English list.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN, StopWordSource::BuiltIn).expect("bundled stop-word list is non-empty")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, StopWordError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| StopWordError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, StopWordSource::File(path.to_path_buf()))
    }

    /// Parses the one-word-per-line format; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, source: StopWordSource) -> Result<Self, StopWordError> {
        let entries: HashSet<String> = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::to_lowercase)
            .collect();
        if entries.is_empty() {
            return Err(StopWordError::Empty(source));
        }
        Ok(Self { entries, source })
    }

    pub fn from_words<I, S>(words: I) -> Result<Self, StopWordError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries: HashSet<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        if entries.is_empty() {
            return Err(StopWordError::Empty(StopWordSource::BuiltIn));
        }
        Ok(Self {
            entries,
            source: StopWordSource::BuiltIn,
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        if word.chars().any(char::is_uppercase) {
            self.entries.contains(&word.to_lowercase())
        } else {
            self.entries.contains(word)
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn source(&self) -> &StopWordSource {
        &self.source
    }

    /// Sorted entries, used when fingerprinting a build configuration.
    pub fn sorted_entries(&self) -> Vec<&str> {
        let sorted: BTreeSet<&str> = self.entries.iter().map(String::as_str).collect();
        sorted.into_iter().collect()
    }
}

impl Default for StopWordList {
    fn default() -> Self {
        Self::builtin()
    }
}
