//! Brute-force reference computations and corpus generators shared by the
//! integration tests. Nothing here calls the index or ranker code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use apirec_core::CorpusDocument;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};

/// Title tokens that survive normalisation, stop-word removal and stemming
/// unchanged, so the oracle can read keywords straight off the title.
pub const VOCAB: [&str; 14] = [
    "w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8", "w9", "w10", "w11", "w12", "w13",
];

/// Includes names contained in one another so related-name removal matters.
pub const API_POOL: [&str; 12] = [
    "List", "ArrayList", "Map", "HashMap", "File", "FileReader", "Node", "Element", "Elements", "Document", "Jsoup",
    "Runnable",
];

/// A generated document together with what it contains.
#[derive(Debug, Clone)]
pub struct GenDoc {
    pub title_tokens: Vec<String>,
    pub apis: BTreeSet<String>,
}

impl GenDoc {
    pub fn to_document(&self, id: usize) -> CorpusDocument {
        let title = self.title_tokens.join(" ");
        let mut body = String::from("<p>Try this:</p>");
        if !self.apis.is_empty() {
            body.push_str("<pre><code>");
            for (i, api) in self.apis.iter().enumerate() {
                body.push_str(&format!("{api} v{i} = new {api}();\n"));
            }
            body.push_str("</code></pre>");
        }
        CorpusDocument::new(id.to_string(), title, body)
    }

    pub fn keywords(&self) -> BTreeSet<String> {
        self.title_tokens.iter().cloned().collect()
    }
}

/// Up to `max_docs` documents, each with 1..=10 title tokens (repeats
/// allowed) and 0..=8 answer APIs.
pub fn random_corpus(rng: &mut StdRng, max_docs: usize) -> Vec<GenDoc> {
    let n = rng.random_range(1..=max_docs);
    (0..n)
        .map(|_| {
            let t = rng.random_range(1..=10);
            let title_tokens = (0..t).map(|_| VOCAB[rng.random_range(0..VOCAB.len())].to_string()).collect();
            let a = rng.random_range(0..=8);
            let mut pool = API_POOL.to_vec();
            pool.shuffle(rng);
            let apis = pool[..a].iter().map(|s| s.to_string()).collect();
            GenDoc { title_tokens, apis }
        })
        .collect()
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn documents(corpus: &[GenDoc]) -> Vec<CorpusDocument> {
    corpus.iter().enumerate().map(|(i, d)| d.to_document(i)).collect()
}

/// Reference index: every count is recomputed by scanning all documents.
pub struct Oracle {
    pub docs: Vec<(BTreeSet<String>, BTreeSet<String>)>,
}

impl Oracle {
    pub fn new(corpus: &[GenDoc]) -> Self {
        Self {
            docs: corpus.iter().map(|d| (d.keywords(), d.apis.clone())).collect(),
        }
    }

    pub fn vocabulary(&self) -> BTreeSet<String> {
        self.docs.iter().flat_map(|(k, _)| k.iter().cloned()).collect()
    }

    pub fn pair_count(&self, keyword: &str, api: &str) -> u64 {
        self.docs
            .iter()
            .filter(|(k, a)| k.contains(keyword) && a.contains(api))
            .count() as u64
    }

    /// All associated APIs, by descending count then name.
    pub fn associations(&self, keyword: &str) -> Vec<(String, u64)> {
        let mut out: Vec<(String, u64)> = API_POOL
            .iter()
            .map(|api| (api.to_string(), self.pair_count(keyword, api)))
            .filter(|(_, c)| *c > 0)
            .collect();
        // Selection sort keeps this independent of the library's comparator.
        let mut sorted = Vec::with_capacity(out.len());
        while !out.is_empty() {
            let mut best = 0;
            for i in 1..out.len() {
                let (ref n, c) = out[i];
                let (ref bn, bc) = out[best];
                if c > bc || (c == bc && n < bn) {
                    best = i;
                }
            }
            sorted.push(out.remove(best));
        }
        sorted
    }

    pub fn candidates(&self, keyword: &str, delta: usize) -> Vec<String> {
        self.associations(keyword).into_iter().take(delta).map(|(n, _)| n).collect()
    }

    pub fn co_count(&self, a: &str, b: &str) -> u64 {
        if a == b {
            return 0;
        }
        self.docs.iter().filter(|(k, _)| k.contains(a) && k.contains(b)).count() as u64
    }

    pub fn cosine(&self, a: &str, b: &str) -> f64 {
        let vocab = self.vocabulary();
        let (mut dot, mut na, mut nb) = (0u128, 0u128, 0u128);
        for w in &vocab {
            let x = self.co_count(a, w) as u128;
            let y = self.co_count(b, w) as u128;
            dot += x * y;
            na += x * x;
            nb += y * y;
        }
        if dot == 0 || na == 0 || nb == 0 {
            return 0.0;
        }
        (dot as f64 / ((na as f64) * (nb as f64)).sqrt()).min(1.0)
    }

    /// Pre-dedup ranking: (api, total) by descending total then name.
    /// Sums run over keywords in sorted order, then keyword pairs in
    /// lexicographic order.
    pub fn scores(&self, keywords: &BTreeSet<String>, delta: usize, gamma: f64) -> Vec<(String, f64)> {
        let mut total: BTreeMap<String, f64> = BTreeMap::new();
        let lists: BTreeMap<&String, Vec<String>> = keywords.iter().map(|k| (k, self.candidates(k, delta))).collect();
        for k in keywords {
            let list = &lists[k];
            for (r, api) in list.iter().enumerate() {
                *total.entry(api.clone()).or_insert(0.0) += (list.len() - r) as f64 / list.len() as f64;
            }
        }
        let kws: Vec<&String> = keywords.iter().collect();
        for i in 0..kws.len() {
            for j in i + 1..kws.len() {
                let c = self.cosine(kws[i], kws[j]);
                if c <= gamma || c <= 0.0 {
                    continue;
                }
                for api in &lists[kws[i]] {
                    if lists[kws[j]].contains(api) {
                        *total.get_mut(api).unwrap() += c;
                    }
                }
            }
        }
        let mut out: Vec<(String, f64)> = total.into_iter().collect();
        out.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then_with(|| x.0.cmp(&y.0)));
        out
    }
}

/// Drops names containing, or contained in, an earlier name.
pub fn oracle_dedup(ranked: &[(String, f64)]) -> Vec<(String, f64)> {
    let mut kept: Vec<(String, f64)> = Vec::new();
    for (name, s) in ranked {
        if kept.iter().all(|(k, _)| !(k.contains(name.as_str()) || name.contains(k.as_str()))) {
            kept.push((name.clone(), *s));
        }
    }
    kept
}

/// Documents realising the worked "java parser html" example: per-keyword
/// top-5 lists with counts 5..1 and context vectors whose pairwise cosines
/// are exactly 0.20, 0.42 and 0.28.
pub fn table_example_corpus() -> Vec<CorpusDocument> {
    let lists: [(&str, [&str; 5]); 3] = [
        ("java", ["List", "ArrayList", "File", "Map", "Runnable"]),
        ("parser", ["Document", "List", "Element", "File", "Node"]),
        ("html", ["Document", "Jsoup", "Element", "Elements", "File"]),
    ];
    let mut docs = Vec::new();
    let mut id = 0usize;
    let mut push = |title: String, body: String, docs: &mut Vec<CorpusDocument>| {
        id += 1;
        docs.push(CorpusDocument::new(format!("t{id}"), title, body));
    };
    // The API at rank r appears in 5 - r of the keyword's documents.
    for (kw, apis) in &lists {
        for n in (1..=5).rev() {
            let code: Vec<String> = apis[..n].iter().map(|a| format!("{a} x{n} = new {a}();")).collect();
            push(kw.to_string(), format!("<pre><code>{}</code></pre>", code.join("\n")), &mut docs);
        }
    }
    // Each keyword has 100 context words with count 1; shared words give
    // dot products 20, 42 and 28 over norms of 100.
    let shared: [(&str, &str, usize); 3] = [("java", "parser", 20), ("parser", "html", 42), ("java", "html", 28)];
    let mut filler = 0usize;
    let mut used: BTreeMap<&str, usize> = BTreeMap::new();
    for (a, b, n) in shared {
        for _ in 0..n {
            filler += 1;
            for kw in [a, b] {
                push(format!("{kw} f{filler}"), "<p>No code.</p>".into(), &mut docs);
                *used.entry(kw).or_default() += 1;
            }
        }
    }
    for (kw, _) in &lists {
        for _ in used[kw]..100 {
            filler += 1;
            push(format!("{kw} f{filler}"), "<p>No code.</p>".into(), &mut docs);
        }
    }
    docs
}
