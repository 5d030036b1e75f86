//! Conversion of a StackExchange data-dump `Posts.xml` into corpus JSONL.
//!
//! The dump stores one `<row .../>` element per line. Rows are parsed one at
//! a time so a malformed row costs one count in the report and nothing else.
//! The file is read twice: the first pass selects questions, the second
//! collects the bodies of their accepted answers.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use quick_xml::events::Event;
use quick_xml::{Reader, XmlVersion};
use serde::Serialize;
use thiserror::Error;

use crate::code::extract_code_blocks;
use crate::corpus::CorpusDocument;

#[derive(Debug, Error)]
pub enum ConvertError {
    #[error("cannot read posts: {0}")]
    Read(#[source] std::io::Error),
    #[error("cannot write corpus: {0}")]
    Write(#[source] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvertOptions {
    /// Required question tag; `None` keeps every question.
    pub tag: Option<String>,
    pub min_answers: u32,
    /// Drop questions whose accepted answer has no `<code>` element.
    pub require_code: bool,
}

impl Default for ConvertOptions {
    fn default() -> Self {
        Self {
            tag: Some("java".to_string()),
            min_answers: 3,
            require_code: true,
        }
    }
}

/// Kept/dropped counts, one field per filter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConvertReport {
    pub rows: u64,
    pub malformed_rows: u64,
    pub questions: u64,
    pub dropped_tag: u64,
    pub dropped_min_answers: u64,
    pub dropped_no_accepted: u64,
    pub dropped_accepted_missing: u64,
    pub dropped_no_code: u64,
    pub kept: u64,
}

#[derive(Debug, Default)]
struct Row {
    id: Option<String>,
    post_type: Option<String>,
    accepted_answer_id: Option<String>,
    answer_count: Option<String>,
    title: Option<String>,
    body: Option<String>,
    tags: Option<String>,
}

enum Parsed {
    Row(Row),
    NotARow,
    Malformed,
}

fn parse_row(line: &str) -> Parsed {
    let trimmed = line.trim();
    if !trimmed.starts_with("<row") {
        return Parsed::NotARow;
    }
    let mut reader = Reader::from_str(trimmed);
    let start = match reader.read_event() {
        Ok(Event::Empty(e)) => e,
        Ok(Event::Start(e)) => e,
        _ => return Parsed::Malformed,
    };
    if start.name().as_ref() != "row" {
        return Parsed::NotARow;
    }
    let mut row = Row::default();
    for attr in start.attributes() {
        let Ok(attr) = attr else {
            return Parsed::Malformed;
        };
        let Ok(value) = attr.normalized_value(XmlVersion::Implicit1_0) else {
            return Parsed::Malformed;
        };
        let value = value.into_owned();
        match attr.key.as_ref() {
            "Id" => row.id = Some(value),
            "PostTypeId" => row.post_type = Some(value),
            "AcceptedAnswerId" => row.accepted_answer_id = Some(value),
            "AnswerCount" => row.answer_count = Some(value),
            "Title" => row.title = Some(value),
            "Body" => row.body = Some(value),
            "Tags" => row.tags = Some(value),
            _ => {}
        }
    }
    match &row.id {
        Some(id) if id.parse::<u64>().is_ok() => Parsed::Row(row),
        _ => Parsed::Malformed,
    }
}

/// Accepts both `<java><string>` and `|java|string|` tag encodings.
pub fn split_tags(raw: &str) -> Vec<String> {
    raw.split(['<', '>', '|'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

struct Question {
    id: String,
    title: String,
    tags: Vec<String>,
    accepted: String,
}

/// Runs both passes. `open` must yield the same content each time it is called.
pub fn convert_posts<R, F, W>(mut open: F, opts: &ConvertOptions, mut out: W) -> Result<ConvertReport, ConvertError>
where
    R: BufRead,
    F: FnMut() -> std::io::Result<R>,
    W: Write,
{
    let mut report = ConvertReport::default();
    let mut questions: Vec<Question> = Vec::new();
    let mut wanted: HashSet<String> = HashSet::new();

    let reader = open().map_err(ConvertError::Read)?;
    for line in reader.lines() {
        let line = line.map_err(ConvertError::Read)?;
        let row = match parse_row(&line) {
            Parsed::Row(r) => r,
            Parsed::NotARow => continue,
            Parsed::Malformed => {
                report.rows += 1;
                report.malformed_rows += 1;
                continue;
            }
        };
        report.rows += 1;
        if row.post_type.as_deref() != Some("1") {
            continue;
        }
        let (Some(id), Some(title)) = (row.id, row.title.filter(|t| !t.trim().is_empty())) else {
            report.malformed_rows += 1;
            continue;
        };
        report.questions += 1;
        let tags = row.tags.as_deref().map(split_tags).unwrap_or_default();
        if let Some(tag) = &opts.tag {
            if !tags.iter().any(|t| t.eq_ignore_ascii_case(tag)) {
                report.dropped_tag += 1;
                continue;
            }
        }
        let answers = row.answer_count.as_deref().and_then(|c| c.trim().parse::<u32>().ok()).unwrap_or(0);
        if answers < opts.min_answers {
            report.dropped_min_answers += 1;
            continue;
        }
        let Some(accepted) = row.accepted_answer_id.filter(|a| !a.trim().is_empty()) else {
            report.dropped_no_accepted += 1;
            continue;
        };
        wanted.insert(accepted.clone());
        questions.push(Question { id, title, tags, accepted });
    }

    let mut bodies: HashMap<String, String> = HashMap::new();
    if !wanted.is_empty() {
        let reader = open().map_err(ConvertError::Read)?;
        for line in reader.lines() {
            let line = line.map_err(ConvertError::Read)?;
            let Parsed::Row(row) = parse_row(&line) else {
                continue;
            };
            if row.post_type.as_deref() != Some("2") {
                continue;
            }
            if let (Some(id), Some(body)) = (row.id, row.body) {
                if wanted.contains(&id) {
                    bodies.insert(id, body);
                }
            }
        }
    }

    for q in questions {
        let Some(body) = bodies.remove(&q.accepted) else {
            report.dropped_accepted_missing += 1;
            continue;
        };
        if opts.require_code && extract_code_blocks(&body).is_empty() {
            report.dropped_no_code += 1;
            continue;
        }
        let doc = CorpusDocument {
            id: q.id,
            title: q.title,
            accepted_answer_html: body,
            tags: q.tags,
        };
        serde_json::to_writer(&mut out, &doc).map_err(|e| ConvertError::Write(e.into()))?;
        out.write_all(b"\n").map_err(ConvertError::Write)?;
        report.kept += 1;
    }
    out.flush().map_err(ConvertError::Write)?;
    Ok(report)
}

pub fn convert_posts_file<W: Write>(path: &Path, opts: &ConvertOptions, out: W) -> Result<ConvertReport, ConvertError> {
    convert_posts(
        || std::fs::File::open(path).map(std::io::BufReader::new),
        opts,
        out,
    )
}
