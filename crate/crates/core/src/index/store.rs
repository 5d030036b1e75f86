//! On-disk index directory: `meta.tsv`, `assoc.tsv`, `context.tsv`.
//!
//! All files are UTF-8 with LF endings and lexicographically sorted rows, so
//! the same index always serializes to the same bytes. `meta.tsv` carries the
//! format version, document count, build fingerprint and a SHA-256 of each
//! data file.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{hex, AssociationIndex, ContextIndex, Indices};
use crate::code::ApiClassName;
use crate::text::Keyword;

pub const FORMAT_VERSION: u32 = 1;

const META: &str = "meta.tsv";
const ASSOC: &str = "assoc.tsv";
const CONTEXT: &str = "context.tsv";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("index format version {found} is not supported (expected {expected})")]
    Version { found: String, expected: u32 },
    #[error("checksum mismatch in {file}: index is corrupted or was edited")]
    Checksum { file: &'static str },
    #[error("{file} line {line}: {message}")]
    Format {
        file: &'static str,
        line: usize,
        message: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

fn render_assoc(assoc: &AssociationIndex) -> String {
    let mut rows: Vec<(&str, &str, u64)> = assoc
        .iter()
        .flat_map(|(k, list)| list.iter().map(move |(a, c)| (k.as_str(), a.as_str(), *c)))
        .collect();
    rows.sort_unstable();
    let mut out = String::new();
    for (k, a, c) in rows {
        let _ = writeln!(out, "{k}\t{a}\t{c}");
    }
    out
}

fn render_context(ctx: &ContextIndex) -> String {
    // pairs() walks a BTreeMap of BTreeMaps, so rows come out sorted.
    let mut out = String::new();
    for (a, b, c) in ctx.pairs() {
        let _ = writeln!(out, "{a}\t{b}\t{c}");
    }
    out
}

/// Writes the index directory, creating it if needed.
pub fn save_index(indices: &Indices, dir: impl AsRef<Path>) -> Result<(), StoreError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let assoc = render_assoc(&indices.assoc);
    let context = render_context(&indices.context);
    let mut meta = BTreeMap::new();
    meta.insert("assoc_sha256", sha256_hex(assoc.as_bytes()));
    meta.insert("config_hash", indices.config_hash.clone());
    meta.insert("context_sha256", sha256_hex(context.as_bytes()));
    meta.insert("doc_count", indices.assoc.doc_count().to_string());
    meta.insert("format_version", FORMAT_VERSION.to_string());
    meta.insert("stopwords_sha256", indices.stopwords_hash.clone());
    let mut meta_text = String::new();
    for (k, v) in meta {
        let _ = writeln!(meta_text, "{k}\t{v}");
    }
    for (name, body) in [(ASSOC, assoc), (CONTEXT, context), (META, meta_text)] {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io_err(&path))?;
    }
    Ok(())
}

fn read(dir: &Path, name: &str) -> Result<String, StoreError> {
    let path = dir.join(name);
    let bytes = fs::read(&path).map_err(io_err(&path))?;
    String::from_utf8(bytes).map_err(|_| StoreError::Io {
        path,
        source: io::Error::new(io::ErrorKind::InvalidData, "not UTF-8"),
    })
}

fn fields<'a>(file: &'static str, line_no: usize, line: &'a str, n: usize) -> Result<Vec<&'a str>, StoreError> {
    let parts: Vec<&str> = line.split('\t').collect();
    if parts.len() != n {
        return Err(StoreError::Format {
            file,
            line: line_no,
            message: format!("expected {n} tab-separated fields, found {}", parts.len()),
        });
    }
    Ok(parts)
}

fn parse_count(file: &'static str, line: usize, s: &str) -> Result<u64, StoreError> {
    match s.parse::<u64>() {
        Ok(c) if c >= 1 => Ok(c),
        _ => Err(StoreError::Format {
            file,
            line,
            message: format!("count {s:?} is not a positive integer"),
        }),
    }
}

fn format_err(file: &'static str, line: usize, message: impl ToString) -> StoreError {
    StoreError::Format {
        file,
        line,
        message: message.to_string(),
    }
}

/// Reads and verifies an index directory.
pub fn load_index(dir: impl AsRef<Path>) -> Result<Indices, StoreError> {
    let dir = dir.as_ref();
    let meta_text = read(dir, META)?;
    let mut meta: HashMap<&str, &str> = HashMap::new();
    for (i, line) in meta_text.lines().enumerate() {
        let f = fields(META, i + 1, line, 2)?;
        meta.insert(f[0], f[1]);
    }
    let get = |key: &str| meta.get(key).copied().ok_or_else(|| format_err(META, 0, format!("missing key {key}")));

    let version = get("format_version")?;
    if version.parse::<u32>().ok() != Some(FORMAT_VERSION) {
        return Err(StoreError::Version {
            found: version.to_string(),
            expected: FORMAT_VERSION,
        });
    }
    let doc_count: u64 = get("doc_count")?
        .parse()
        .map_err(|_| format_err(META, 0, "doc_count is not an integer"))?;
    let config_hash = get("config_hash")?.to_string();
    let stopwords_hash = get("stopwords_sha256")?.to_string();

    let assoc_text = read(dir, ASSOC)?;
    if sha256_hex(assoc_text.as_bytes()) != get("assoc_sha256")? {
        return Err(StoreError::Checksum { file: ASSOC });
    }
    let context_text = read(dir, CONTEXT)?;
    if sha256_hex(context_text.as_bytes()) != get("context_sha256")? {
        return Err(StoreError::Checksum { file: CONTEXT });
    }

    let mut counts: HashMap<Keyword, HashMap<ApiClassName, u64>> = HashMap::new();
    for (i, line) in assoc_text.lines().enumerate() {
        let f = fields(ASSOC, i + 1, line, 3)?;
        let k = Keyword::new(f[0]).map_err(|e| format_err(ASSOC, i + 1, e))?;
        let a = ApiClassName::new(f[1]).map_err(|e| format_err(ASSOC, i + 1, e))?;
        let c = parse_count(ASSOC, i + 1, f[2])?;
        if counts.entry(k).or_default().insert(a, c).is_some() {
            return Err(format_err(ASSOC, i + 1, "duplicate row"));
        }
    }

    let mut context = ContextIndex::default();
    for (i, line) in context_text.lines().enumerate() {
        let f = fields(CONTEXT, i + 1, line, 3)?;
        let a = Keyword::new(f[0]).map_err(|e| format_err(CONTEXT, i + 1, e))?;
        let b = Keyword::new(f[1]).map_err(|e| format_err(CONTEXT, i + 1, e))?;
        if a >= b {
            return Err(format_err(CONTEXT, i + 1, "pair must satisfy a < b"));
        }
        let c = parse_count(CONTEXT, i + 1, f[2])?;
        if context.count(&a, &b) != 0 {
            return Err(format_err(CONTEXT, i + 1, "duplicate row"));
        }
        context.insert_pair(a, b, c);
    }

    Ok(Indices {
        assoc: AssociationIndex::from_counts(counts, doc_count, 1),
        context,
        config_hash,
        stopwords_hash,
    })
}
