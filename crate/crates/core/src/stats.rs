//! Exploratory corpus statistics: per-answer API frequency distributions,
//! package class coverage, and overlap between a search-query log and the
//! title vocabulary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::code::{api_token_occurrences, extract_answer_apis, extract_code_blocks, ApiWhitelist};
use crate::corpus::CorpusDocument;
use crate::text::{normalize_and_split, preprocess_title, Keyword, StopWordList};

/// Quantiles reported for every distribution.
pub const DEFAULT_QUANTILES: [f64; 4] = [0.10, 0.30, 0.80, 0.975];

/// Query-log filter used to select code search queries.
pub const CODE_SEARCH_TERMS: [&str; 4] = ["java", "code", "example", "programmatically"];

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("API whitelist is empty")]
    EmptyWhitelist,
    #[error("package map is empty")]
    EmptyPackageMap,
    #[error("query log is empty")]
    EmptyQueryLog,
    #[error("no query in the log contains any of the filter terms {0:?}")]
    EmptyFilteredLog(Vec<String>),
    #[error("cannot read {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantile {
    pub q: f64,
    pub value: u64,
}

/// Histogram of a non-negative integer statistic over documents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyDistribution {
    /// value -> number of documents with that value
    pub histogram: BTreeMap<u64, u64>,
    pub documents: u64,
    /// 0 when there are no documents.
    pub mean: f64,
    pub quantiles: Vec<Quantile>,
}

impl FrequencyDistribution {
    pub fn from_values(values: impl IntoIterator<Item = u64>, quantiles: &[f64]) -> Self {
        let mut histogram = BTreeMap::new();
        for v in values {
            *histogram.entry(v).or_insert(0u64) += 1;
        }
        let documents: u64 = histogram.values().sum();
        let mean = if documents == 0 {
            0.0
        } else {
            histogram.iter().map(|(v, c)| (*v as f64) * (*c as f64)).sum::<f64>() / documents as f64
        };
        let quantiles = if documents == 0 {
            Vec::new()
        } else {
            quantiles
                .iter()
                .map(|&q| Quantile {
                    q,
                    value: quantile(&histogram, documents, q),
                })
                .collect()
        };
        Self {
            histogram,
            documents,
            mean,
            quantiles,
        }
    }

    /// `value<TAB>count<TAB>pmf<TAB>cdf` rows in ascending value order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("value\tcount\tpmf\tcdf\n");
        let mut cum = 0u64;
        for (v, c) in &self.histogram {
            cum += c;
            let _ = writeln!(
                out,
                "{v}\t{c}\t{:.6}\t{:.6}",
                *c as f64 / self.documents as f64,
                cum as f64 / self.documents as f64
            );
        }
        out
    }
}

/// Smallest value whose cumulative share reaches `q`.
fn quantile(histogram: &BTreeMap<u64, u64>, total: u64, q: f64) -> u64 {
    let mut cum = 0u64;
    for (v, c) in histogram {
        cum += c;
        if cum as f64 >= q * total as f64 {
            return *v;
        }
    }
    *histogram.keys().next_back().expect("non-empty histogram")
}

/// Whitelisted API usage per answer. Answers with no whitelisted API are
/// left out. `distinct` counts classes instead of occurrences.
pub fn api_frequency_stats(
    corpus: &[CorpusDocument],
    whitelist: &ApiWhitelist,
    distinct: bool,
) -> Result<FrequencyDistribution, StatsError> {
    if whitelist.is_empty() {
        return Err(StatsError::EmptyWhitelist);
    }
    let values: Vec<u64> = corpus
        .par_iter()
        .filter_map(|doc| {
            let occurrences: Vec<_> = extract_code_blocks(&doc.accepted_answer_html)
                .iter()
                .flat_map(|b| api_token_occurrences(&b.text))
                .filter(|a| whitelist.contains(a))
                .collect();
            if occurrences.is_empty() {
                return None;
            }
            let n = if distinct {
                occurrences.iter().collect::<BTreeSet<_>>().len()
            } else {
                occurrences.len()
            };
            Some(n as u64)
        })
        .collect();
    Ok(FrequencyDistribution::from_values(values, &DEFAULT_QUANTILES))
}

/// package -> class names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PackageMap {
    pub packages: BTreeMap<String, BTreeSet<String>>,
}

impl PackageMap {
    /// `package<TAB>Class1,Class2,...` per line; `#` comments allowed.
    pub fn parse(text: &str) -> Result<Self, StatsError> {
        let mut packages: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let Some((pkg, classes)) = line.split_once('\t') else {
                return Err(StatsError::Parse {
                    line: i + 1,
                    message: "expected package<TAB>comma-separated classes".into(),
                });
            };
            let set = packages.entry(pkg.trim().to_string()).or_default();
            set.extend(classes.split(',').map(str::trim).filter(|c| !c.is_empty()).map(str::to_string));
        }
        Ok(Self { packages })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, StatsError> {
        Self::parse(&read(path.as_ref())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackageCoverage {
    pub package: String,
    pub classes_total: usize,
    pub classes_seen: usize,
    /// classes_seen / classes_total
    pub coverage: f64,
    pub answers_using: u64,
    /// answers_using / all answers
    pub answer_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub answers: u64,
    pub packages: Vec<PackageCoverage>,
    /// Unweighted mean of the per-package class coverage.
    pub mean_coverage: f64,
}

impl CoverageReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("package\tclasses_total\tclasses_seen\tcoverage\tanswers_using\tanswer_fraction\n");
        for p in &self.packages {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.6}\t{}\t{:.6}",
                p.package, p.classes_total, p.classes_seen, p.coverage, p.answers_using, p.answer_fraction
            );
        }
        out
    }
}

pub fn package_coverage(corpus: &[CorpusDocument], package_map: &PackageMap) -> Result<CoverageReport, StatsError> {
    if package_map.packages.is_empty() {
        return Err(StatsError::EmptyPackageMap);
    }
    let per_answer: Vec<BTreeSet<String>> = corpus
        .par_iter()
        .map(|d| {
            extract_answer_apis(&d.accepted_answer_html, None)
                .into_iter()
                .map(String::from)
                .collect()
        })
        .collect();
    let answers = corpus.len() as u64;
    let packages: Vec<PackageCoverage> = package_map
        .packages
        .iter()
        .map(|(pkg, classes)| {
            let mut seen: BTreeSet<&str> = BTreeSet::new();
            let mut answers_using = 0u64;
            for apis in &per_answer {
                let mut uses = false;
                for c in classes {
                    if apis.contains(c) {
                        seen.insert(c);
                        uses = true;
                    }
                }
                if uses {
                    answers_using += 1;
                }
            }
            PackageCoverage {
                package: pkg.clone(),
                classes_total: classes.len(),
                classes_seen: seen.len(),
                coverage: ratio(seen.len() as f64, classes.len() as f64),
                answers_using,
                answer_fraction: ratio(answers_using as f64, answers as f64),
            }
        })
        .collect();
    let mean_coverage = packages.iter().map(|p| p.coverage).sum::<f64>() / packages.len() as f64;
    Ok(CoverageReport {
        answers,
        packages,
        mean_coverage,
    })
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// One line of a search-query log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryLogEntry {
    pub date: Option<NaiveDate>,
    pub query: String,
}

/// One query per line with an optional `YYYY-MM-DD<TAB>` prefix.
pub fn parse_query_log(text: &str) -> Vec<QueryLogEntry> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            if let Some((head, rest)) = line.split_once('\t') {
                if let Ok(date) = NaiveDate::parse_from_str(head.trim(), "%Y-%m-%d") {
                    return QueryLogEntry {
                        date: Some(date),
                        query: rest.trim().to_string(),
                    };
                }
            }
            QueryLogEntry {
                date: None,
                query: line.trim().to_string(),
            }
        })
        .collect()
}

pub fn load_query_log(path: impl AsRef<Path>) -> Result<Vec<QueryLogEntry>, StatsError> {
    Ok(parse_query_log(&read(path.as_ref())?))
}

fn read(path: &Path) -> Result<String, StatsError> {
    std::fs::read_to_string(path).map_err(|source| StatsError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearCoverage {
    pub year: i32,
    pub queries: usize,
    pub keywords: usize,
    pub covered: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeywordCoverage {
    pub filter_terms: Vec<String>,
    pub queries_total: usize,
    pub queries_retained: usize,
    pub query_keywords: usize,
    pub covered_keywords: usize,
    /// covered_keywords / query_keywords
    pub fraction: f64,
    pub per_year: Vec<YearCoverage>,
    /// Number of query keywords found in each title.
    pub per_title: FrequencyDistribution,
}

impl KeywordCoverage {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("scope\tqueries\tkeywords\tcovered\tfraction\n");
        let _ = writeln!(
            out,
            "all\t{}\t{}\t{}\t{:.6}",
            self.queries_retained, self.query_keywords, self.covered_keywords, self.fraction
        );
        for y in &self.per_year {
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{:.6}", y.year, y.queries, y.keywords, y.covered, y.fraction);
        }
        out
    }
}

/// Share of distinct query keywords that also occur in corpus titles.
/// Queries are kept only if one of their tokens is a filter term.
pub fn keyword_coverage(
    titles: &[&str],
    queries: &[QueryLogEntry],
    filter_terms: &BTreeSet<String>,
    stops: &StopWordList,
) -> Result<KeywordCoverage, StatsError> {
    if queries.is_empty() {
        return Err(StatsError::EmptyQueryLog);
    }
    let filter: BTreeSet<String> = filter_terms.iter().map(|t| t.to_lowercase()).collect();
    let retained: Vec<&QueryLogEntry> = queries
        .iter()
        .filter(|q| normalize_and_split(&q.query).iter().any(|t| filter.contains(t)))
        .collect();
    if retained.is_empty() {
        return Err(StatsError::EmptyFilteredLog(filter.into_iter().collect()));
    }

    let title_keywords: Vec<BTreeSet<Keyword>> = titles.par_iter().map(|t| preprocess_title(t, stops).keywords).collect();
    let vocabulary: BTreeSet<&Keyword> = title_keywords.iter().flatten().collect();

    let query_sets: Vec<(Option<i32>, BTreeSet<Keyword>)> = retained
        .iter()
        .map(|q| (q.date.map(|d| d.year()), preprocess_title(&q.query, stops).keywords))
        .collect();
    let query_vocab: BTreeSet<&Keyword> = query_sets.iter().flat_map(|(_, s)| s).collect();
    let covered = query_vocab.iter().filter(|k| vocabulary.contains(*k)).count();

    let mut by_year: BTreeMap<i32, (usize, BTreeSet<&Keyword>)> = BTreeMap::new();
    for (year, set) in &query_sets {
        if let Some(y) = year {
            let slot = by_year.entry(*y).or_default();
            slot.0 += 1;
            slot.1.extend(set.iter());
        }
    }
    let per_year = by_year
        .into_iter()
        .map(|(year, (n, kws))| {
            let c = kws.iter().filter(|k| vocabulary.contains(*k)).count();
            YearCoverage {
                year,
                queries: n,
                keywords: kws.len(),
                covered: c,
                fraction: ratio(c as f64, kws.len() as f64),
            }
        })
        .collect();

    let per_title = FrequencyDistribution::from_values(
        title_keywords
            .iter()
            .map(|t| t.iter().filter(|k| query_vocab.contains(k)).count() as u64),
        &DEFAULT_QUANTILES,
    );

    Ok(KeywordCoverage {
        filter_terms: filter.into_iter().collect(),
        queries_total: queries.len(),
        queries_retained: retained.len(),
        query_keywords: query_vocab.len(),
        covered_keywords: covered,
        fraction: ratio(covered as f64, query_vocab.len() as f64),
        per_year,
        per_title,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::ApiClassName;

    fn wl(names: &[&str]) -> ApiWhitelist {
        ApiWhitelist::new(names.iter().map(|n| ApiClassName::new(*n).unwrap()))
    }

    fn answer(id: &str, code: &str) -> CorpusDocument {
        CorpusDocument::new(id, "title", format!("<pre><code>{code}</code></pre>"))
    }

    #[test]
    fn total_and_distinct_frequency() {
        let corpus = vec![answer("1", "MessageDigest a = MessageDigest.getInstance(); MessageDigest b;")];
        let w = wl(&["MessageDigest"]);
        let total = api_frequency_stats(&corpus, &w, false).unwrap();
        assert_eq!(total.histogram, BTreeMap::from([(3, 1)]));
        let corpus = vec![answer("1", "A1b x; A1b y; Bb z;")];
        let d = api_frequency_stats(&corpus, &wl(&["A1b", "Bb"]), true).unwrap();
        assert_eq!(d.histogram, BTreeMap::from([(2, 1)]));
    }

    #[test]
    fn answers_without_whitelisted_apis_are_excluded() {
        let corpus = vec![answer("1", "Foo f;"), answer("2", "String s;")];
        let d = api_frequency_stats(&corpus, &wl(&["String"]), false).unwrap();
        assert_eq!(d.documents, 1);
    }

    #[test]
    fn empty_inputs() {
        let d = api_frequency_stats(&[], &wl(&["String"]), false).unwrap();
        assert_eq!(d.documents, 0);
        assert!(d.histogram.is_empty());
        assert_eq!(d.mean, 0.0);
        assert!(matches!(api_frequency_stats(&[], &ApiWhitelist::default(), false), Err(StatsError::EmptyWhitelist)));
    }

    #[test]
    fn quantiles_use_inverse_cdf() {
        let d = FrequencyDistribution::from_values([1, 1, 2, 2, 2, 3, 4, 4, 5, 10], &DEFAULT_QUANTILES);
        let q: Vec<u64> = d.quantiles.iter().map(|q| q.value).collect();
        assert_eq!(q, vec![1, 2, 4, 10]);
        assert!((d.mean - 3.4).abs() < 1e-12);
        let tsv = d.to_tsv();
        assert!(tsv.ends_with("10\t1\t0.100000\t1.000000\n"));
    }

    #[test]
    fn coverage_cases() {
        let map = PackageMap::parse("java.io\tFile,Reader\njava.sql\tConnection,Statement\n").unwrap();
        let corpus = vec![answer("1", "File f; Reader r;"), answer("2", "String s;")];
        let report = package_coverage(&corpus, &map).unwrap();
        let io = &report.packages[0];
        assert_eq!((io.classes_seen, io.classes_total), (2, 2));
        assert_eq!(io.coverage, 1.0);
        assert_eq!(io.answers_using, 1);
        assert_eq!(io.answer_fraction, 0.5);
        let sql = &report.packages[1];
        assert_eq!(sql.coverage, 0.0);
        assert_eq!(report.mean_coverage, 0.5);
        assert!(matches!(package_coverage(&corpus, &PackageMap::default()), Err(StatsError::EmptyPackageMap)));
    }

    #[test]
    fn query_log_parsing() {
        let log = parse_query_log("2012-03-04\tjava read file\nparse xml example\n\n2013-13-01\tbad date\n");
        assert_eq!(log.len(), 3);
        assert_eq!(log[0].date, NaiveDate::from_ymd_opt(2012, 3, 4));
        assert_eq!(log[0].query, "java read file");
        assert_eq!(log[1].date, None);
        assert_eq!(log[2].date, None);
        assert_eq!(log[2].query, "2013-13-01\tbad date");
    }

    fn filter() -> BTreeSet<String> {
        CODE_SEARCH_TERMS.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn keyword_coverage_cases() {
        let stops = StopWordList::builtin();
        let titles = ["How to read a file in Java", "Parse XML in Java"];
        let full = parse_query_log("java read file\nxml parse java\n");
        let r = keyword_coverage(&titles, &full, &filter(), &stops).unwrap();
        assert_eq!(r.fraction, 1.0);

        let disjoint = parse_query_log("java\n");
        let r = keyword_coverage(&["Sorting lists"], &disjoint, &filter(), &stops).unwrap();
        assert_eq!(r.fraction, 0.0);

        let err = keyword_coverage(&titles, &parse_query_log("python sort\n"), &filter(), &stops).unwrap_err();
        assert!(matches!(err, StatsError::EmptyFilteredLog(ref f) if f.len() == 4));
        assert!(matches!(keyword_coverage(&titles, &[], &filter(), &stops), Err(StatsError::EmptyQueryLog)));
    }
}
