//! Keyword-API association index and keyword context index.
//!
//! Both are built from (title, accepted answer) pairs. A keyword and an API
//! co-occur in a document when the keyword is in the title's keyword set and
//! the API is used in the answer's code; each document counts at most once
//! per pair. Two keywords co-occur when they share a title.

mod store;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::code::{extract_answer_apis, ApiClassName, ApiWhitelist};
use crate::corpus::{CorpusDocument, DocumentError};
use crate::text::{preprocess_title, Keyword, StopWordList};

pub use store::{load_index, save_index, StoreError, FORMAT_VERSION};

/// Everything that affects index contents.
#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub stopwords: StopWordList,
    pub whitelist: Option<ApiWhitelist>,
    /// Associations seen in fewer documents than this are dropped.
    pub min_count: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            stopwords: StopWordList::builtin(),
            whitelist: None,
            min_count: 1,
        }
    }
}

impl BuildConfig {
    /// Hex SHA-256 over a canonical rendering of the configuration.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"stopwords\n");
        for w in self.stopwords.sorted_entries() {
            h.update(w.as_bytes());
            h.update(b"\n");
        }
        h.update(b"whitelist\n");
        match &self.whitelist {
            None => h.update(b"none\n"),
            Some(wl) => {
                for name in wl.iter() {
                    h.update(name.as_str().as_bytes());
                    h.update(b"\n");
                }
            }
        }
        h.update(format!("min_count\n{}\n", self.min_count).as_bytes());
        hex(&h.finalize())
    }

    /// Fingerprint of the stop-word list alone, so a query-time list can be
    /// checked against the one used for the build.
    pub fn stopword_fingerprint(stops: &StopWordList) -> String {
        let mut h = Sha256::new();
        for w in stops.sorted_entries() {
            h.update(w.as_bytes());
            h.update(b"\n");
        }
        hex(&h.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

static EMPTY_CONTEXT: BTreeMap<Keyword, u64> = BTreeMap::new();

/// keyword -> APIs sorted by descending count, then ascending name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssociationIndex {
    assoc: BTreeMap<Keyword, Vec<(ApiClassName, u64)>>,
    doc_count: u64,
}

impl AssociationIndex {
    pub fn doc_count(&self) -> u64 {
        self.doc_count
    }

    /// Full sorted association list of a keyword.
    pub fn associations(&self, keyword: &Keyword) -> &[(ApiClassName, u64)] {
        self.assoc.get(keyword).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The `delta` most frequent APIs of a keyword.
    pub fn top_candidates(&self, keyword: &Keyword, delta: usize) -> &[(ApiClassName, u64)] {
        assert!(delta >= 1, "delta must be at least 1");
        let all = self.associations(keyword);
        &all[..all.len().min(delta)]
    }

    pub fn vocabulary_size(&self) -> usize {
        self.assoc.len()
    }

    pub fn association_count(&self) -> usize {
        self.assoc.values().map(Vec::len).sum()
    }

    pub fn total_count(&self) -> u64 {
        self.assoc.values().flatten().map(|(_, c)| *c).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Keyword, &[(ApiClassName, u64)])> {
        self.assoc.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub(crate) fn from_counts(counts: HashMap<Keyword, HashMap<ApiClassName, u64>>, doc_count: u64, min_count: u64) -> Self {
        let assoc = counts
            .into_iter()
            .filter_map(|(k, apis)| {
                let mut list: Vec<(ApiClassName, u64)> =
                    apis.into_iter().filter(|(_, c)| *c >= min_count.max(1)).collect();
                if list.is_empty() {
                    return None;
                }
                sort_by_frequency(&mut list);
                Some((k, list))
            })
            .collect();
        Self { assoc, doc_count }
    }
}

/// Descending count, ties by ascending API name.
pub fn sort_by_frequency(list: &mut [(ApiClassName, u64)]) {
    list.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

/// Symmetric keyword co-occurrence counts; never holds self-pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextIndex {
    ctx: BTreeMap<Keyword, BTreeMap<Keyword, u64>>,
}

impl ContextIndex {
    /// Co-occurrence counts of one keyword; empty for unknown keywords.
    pub fn context_vector(&self, keyword: &Keyword) -> &BTreeMap<Keyword, u64> {
        self.ctx.get(keyword).unwrap_or(&EMPTY_CONTEXT)
    }

    pub fn count(&self, a: &Keyword, b: &Keyword) -> u64 {
        self.ctx.get(a).and_then(|m| m.get(b)).copied().unwrap_or(0)
    }

    pub fn keyword_count(&self) -> usize {
        self.ctx.len()
    }

    /// Each unordered pair once, with `a < b`.
    pub fn pairs(&self) -> impl Iterator<Item = (&Keyword, &Keyword, u64)> {
        self.ctx
            .iter()
            .flat_map(|(a, m)| m.iter().filter(move |(b, _)| a < *b).map(move |(b, c)| (a, b, *c)))
    }

    pub(crate) fn insert_pair(&mut self, a: Keyword, b: Keyword, count: u64) {
        debug_assert!(a != b);
        *self.ctx.entry(a.clone()).or_default().entry(b.clone()).or_insert(0) += count;
        *self.ctx.entry(b).or_default().entry(a).or_insert(0) += count;
    }
}

/// Both indices plus the fingerprint of the configuration that built them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Indices {
    pub assoc: AssociationIndex,
    pub context: ContextIndex,
    pub config_hash: String,
    /// Fingerprint of the stop-word list alone; see [`BuildConfig::stopword_fingerprint`].
    pub stopwords_hash: String,
}

impl Indices {
    /// Count-wise sum of two indices built with the same configuration from
    /// disjoint corpora. Assumes no `min_count` pruning has happened.
    pub fn merge(&self, other: &Indices) -> Indices {
        let mut counts: HashMap<Keyword, HashMap<ApiClassName, u64>> = HashMap::new();
        for (k, list) in self.assoc.iter().chain(other.assoc.iter()) {
            let slot = counts.entry(k.clone()).or_default();
            for (api, c) in list {
                *slot.entry(api.clone()).or_insert(0) += c;
            }
        }
        let mut context = self.context.clone();
        for (a, b, c) in other.context.pairs() {
            context.insert_pair(a.clone(), b.clone(), c);
        }
        Indices {
            assoc: AssociationIndex::from_counts(counts, self.assoc.doc_count + other.assoc.doc_count, 1),
            context,
            config_hash: self.config_hash.clone(),
            stopwords_hash: self.stopwords_hash.clone(),
        }
    }
}

/// What happened to the documents of one build.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub ingested: u64,
    pub without_apis: u64,
    pub skipped: Vec<SkippedDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedDocument {
    pub id: String,
    pub reason: String,
}

/// Per-document extraction result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentTerms {
    pub keywords: BTreeSet<Keyword>,
    pub apis: BTreeSet<ApiClassName>,
}

pub fn document_terms(doc: &CorpusDocument, cfg: &BuildConfig) -> DocumentTerms {
    DocumentTerms {
        keywords: preprocess_title(&doc.title, &cfg.stopwords).keywords,
        apis: extract_answer_apis(&doc.accepted_answer_html, cfg.whitelist.as_ref()),
    }
}

/// Mergeable raw counts. Merging is plain addition, so any partition of the
/// corpus gives the same totals.
#[derive(Debug, Default, Clone)]
pub struct IndexBuilder {
    assoc: HashMap<Keyword, HashMap<ApiClassName, u64>>,
    ctx: HashMap<(Keyword, Keyword), u64>,
    doc_count: u64,
    without_apis: u64,
}

impl IndexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_terms(&mut self, terms: &DocumentTerms) {
        self.doc_count += 1;
        if terms.apis.is_empty() {
            self.without_apis += 1;
        }
        for k in &terms.keywords {
            if terms.apis.is_empty() {
                break;
            }
            let slot = self.assoc.entry(k.clone()).or_default();
            for api in &terms.apis {
                *slot.entry(api.clone()).or_insert(0) += 1;
            }
        }
        // BTreeSet iteration is ordered, so (a, b) always has a < b.
        let kws: Vec<&Keyword> = terms.keywords.iter().collect();
        for (i, a) in kws.iter().enumerate() {
            for b in &kws[i + 1..] {
                *self.ctx.entry(((*a).clone(), (*b).clone())).or_insert(0) += 1;
            }
        }
    }

    pub fn merge(mut self, other: IndexBuilder) -> IndexBuilder {
        for (k, apis) in other.assoc {
            let slot = self.assoc.entry(k).or_default();
            for (api, c) in apis {
                *slot.entry(api).or_insert(0) += c;
            }
        }
        for (pair, c) in other.ctx {
            *self.ctx.entry(pair).or_insert(0) += c;
        }
        self.doc_count += other.doc_count;
        self.without_apis += other.without_apis;
        self
    }

    pub fn finish(self, cfg: &BuildConfig) -> Indices {
        let mut context = ContextIndex::default();
        for ((a, b), c) in self.ctx {
            context.insert_pair(a, b, c);
        }
        Indices {
            assoc: AssociationIndex::from_counts(self.assoc, self.doc_count, cfg.min_count),
            context,
            config_hash: cfg.fingerprint(),
            stopwords_hash: BuildConfig::stopword_fingerprint(&cfg.stopwords),
        }
    }
}

/// Sequential build over a document stream. Malformed or duplicate
/// documents are skipped and listed in the report.
pub fn build_index<I>(corpus: I, cfg: &BuildConfig) -> (Indices, IngestReport)
where
    I: IntoIterator<Item = CorpusDocument>,
{
    let mut builder = IndexBuilder::new();
    let mut report = IngestReport::default();
    let mut seen: HashSet<String> = HashSet::new();
    for doc in corpus {
        if let Err(e) = admit(&doc, &mut seen) {
            report.skipped.push(SkippedDocument { id: doc.id.clone(), reason: e.to_string() });
            continue;
        }
        builder.add_terms(&document_terms(&doc, cfg));
    }
    report.ingested = builder.doc_count;
    report.without_apis = builder.without_apis;
    (builder.finish(cfg), report)
}

/// Parallel build; identical output to [`build_index`] on the same input.
pub fn build_index_par(corpus: &[CorpusDocument], cfg: &BuildConfig) -> (Indices, IngestReport) {
    let mut report = IngestReport::default();
    let mut seen: HashSet<String> = HashSet::new();
    let admitted: Vec<&CorpusDocument> = corpus
        .iter()
        .filter(|doc| match admit(doc, &mut seen) {
            Ok(()) => true,
            Err(e) => {
                report.skipped.push(SkippedDocument { id: doc.id.clone(), reason: e.to_string() });
                false
            }
        })
        .collect();
    let builder = admitted
        .par_iter()
        .fold(IndexBuilder::new, |mut b, doc| {
            b.add_terms(&document_terms(doc, cfg));
            b
        })
        .reduce(IndexBuilder::new, IndexBuilder::merge);
    report.ingested = builder.doc_count;
    report.without_apis = builder.without_apis;
    (builder.finish(cfg), report)
}

fn admit(doc: &CorpusDocument, seen: &mut HashSet<String>) -> Result<(), DocumentError> {
    doc.validate()?;
    if !seen.insert(doc.id.clone()) {
        return Err(DocumentError::DuplicateId(doc.id.clone()));
    }
    Ok(())
}
