//! Island parsing of API class names out of answer HTML.
//!
//! Only the text inside `<code>` elements is considered. Each block is split
//! on whitespace and punctuation, and the fragments that look like Java class
//! names (leading uppercase letter, at least one lowercase letter, letters and
//! digits only, not a reserved word) are kept.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::LazyLock;

use scraper::{ElementRef, Html, Selector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

static CODE_SELECTOR: LazyLock<Selector> = LazyLock::new(|| Selector::parse("code").expect("static selector"));

// Java reserved keywords plus the three literals.
const RESERVED: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null", "_",
];

static RESERVED_SET: LazyLock<HashSet<&'static str>> = LazyLock::new(|| RESERVED.iter().copied().collect());

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{0:?} is not a camel-case class name")]
pub struct InvalidApiName(pub String);

/// A Java-style class identifier found in code.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ApiClassName(String);

impl ApiClassName {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidApiName> {
        let name = name.into();
        if is_class_name(&name) {
            Ok(Self(name))
        } else {
            Err(InvalidApiName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ApiClassName {
    type Error = InvalidApiName;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        ApiClassName::new(s)
    }
}

impl From<ApiClassName> for String {
    fn from(a: ApiClassName) -> String {
        a.0
    }
}

impl fmt::Display for ApiClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for ApiClassName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for ApiClassName {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// The camel-case class pattern. ASCII only, as in Java source.
pub fn is_class_name(token: &str) -> bool {
    let mut chars = token.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    first.is_ascii_uppercase()
        && token.chars().all(|c| c.is_ascii_alphanumeric())
        && token.chars().any(|c| c.is_ascii_lowercase())
        && !RESERVED_SET.contains(token)
}

/// Verbatim text of one `<code>` element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeBlock {
    pub text: String,
    pub answer_id: Option<String>,
}

impl CodeBlock {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            answer_id: None,
        }
    }
}

/// Text content of every outermost `<code>` element, in document order.
pub fn extract_code_blocks(html: &str) -> Vec<CodeBlock> {
    extract_code_blocks_for(html, None)
}

pub fn extract_code_blocks_for(html: &str, answer_id: Option<&str>) -> Vec<CodeBlock> {
    if !html.contains('<') {
        return Vec::new();
    }
    let doc = Html::parse_fragment(html);
    doc.select(&CODE_SELECTOR)
        .filter(|el| !has_code_ancestor(el))
        .map(|el| CodeBlock {
            text: el.text().collect(),
            answer_id: answer_id.map(str::to_string),
        })
        .collect()
}

fn has_code_ancestor(el: &ElementRef<'_>) -> bool {
    el.ancestors()
        .filter_map(ElementRef::wrap)
        .any(|a| a.value().name() == "code")
}

/// Every class-name token in the block, in order, with repeats.
pub fn api_token_occurrences(text: &str) -> Vec<ApiClassName> {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| is_class_name(t))
        .map(|t| ApiClassName(t.to_string()))
        .collect()
}

pub fn parse_api_tokens(block: &CodeBlock) -> BTreeSet<ApiClassName> {
    api_token_occurrences(&block.text).into_iter().collect()
}

/// Unique API classes used across all code blocks of an answer, optionally
/// restricted to a whitelist.
pub fn extract_answer_apis(html: &str, whitelist: Option<&ApiWhitelist>) -> BTreeSet<ApiClassName> {
    let mut apis = BTreeSet::new();
    for block in extract_code_blocks(html) {
        apis.extend(parse_api_tokens(&block));
    }
    match whitelist {
        Some(wl) => apis.into_iter().filter(|a| wl.contains(a)).collect(),
        None => apis,
    }
}

#[derive(Debug, Error)]
pub enum WhitelistError {
    #[error("cannot read whitelist {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("whitelist line {line}: {source}")]
    BadName {
        line: usize,
        #[source]
        source: InvalidApiName,
    },
}

/// Closed set of class names accepted during extraction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ApiWhitelist {
    names: BTreeSet<ApiClassName>,
}

impl ApiWhitelist {
    pub fn new(names: impl IntoIterator<Item = ApiClassName>) -> Self {
        Self {
            names: names.into_iter().collect(),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, WhitelistError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| WhitelistError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// One class name per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, WhitelistError> {
        let mut names = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let name = ApiClassName::new(line).map_err(|source| WhitelistError::BadName { line: i + 1, source })?;
            names.insert(name);
        }
        Ok(Self { names })
    }

    pub fn contains(&self, name: &ApiClassName) -> bool {
        self.names.contains(name)
    }

    pub fn contains_str(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ApiClassName> {
        self.names.iter()
    }
}
