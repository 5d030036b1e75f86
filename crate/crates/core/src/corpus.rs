//! Corpus documents (question title + accepted answer) and their JSON Lines
//! representation.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub id: String,
    pub title: String,
    pub accepted_answer_html: String,
    #[serde(default)]
    pub tags: Vec<String>,
}

impl CorpusDocument {
    pub fn new(id: impl Into<String>, title: impl Into<String>, accepted_answer_html: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            accepted_answer_html: accepted_answer_html.into(),
            tags: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), DocumentError> {
        if self.id.trim().is_empty() {
            return Err(DocumentError::MissingId);
        }
        if self.title.trim().is_empty() {
            return Err(DocumentError::EmptyTitle(self.id.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DocumentError {
    #[error("document has no id")]
    MissingId,
    #[error("document {0} has an empty title")]
    EmptyTitle(String),
    #[error("duplicate document id {0}")]
    DuplicateId(String),
    #[error("line {line}: {message}")]
    Json { line: usize, message: String },
}

/// One malformed input record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub line: usize,
    pub reason: String,
}

/// Documents parsed from JSON Lines plus the lines that could not be used.
#[derive(Debug, Default)]
pub struct JsonlRead {
    pub documents: Vec<CorpusDocument>,
    pub skipped: Vec<Skipped>,
}

/// Reads JSONL, skipping blank lines and recording unparseable ones.
/// Only I/O failures abort.
pub fn read_jsonl<R: BufRead>(reader: R) -> std::io::Result<JsonlRead> {
    let mut out = JsonlRead::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CorpusDocument>(&line) {
            Ok(doc) => out.documents.push(doc),
            Err(e) => out.skipped.push(Skipped {
                line: i + 1,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

pub fn read_jsonl_file(path: impl AsRef<std::path::Path>) -> std::io::Result<JsonlRead> {
    let file = std::fs::File::open(path)?;
    read_jsonl(std::io::BufReader::new(file))
}

pub fn write_jsonl<W: Write>(mut writer: W, docs: &[CorpusDocument]) -> std::io::Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut writer, doc)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
