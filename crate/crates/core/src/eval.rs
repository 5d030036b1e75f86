//! Evaluation against a gold set: Top-K accuracy, MRR@K, MAP@K and mean
//! recall@K, plus the query-term-mode sweep.
//!
//! Ranked results and gold entries are aligned by position. Gold matching is
//! exact and case-sensitive on the class name.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::index::Indices;
use crate::recommend::{recommend, QueryConfig};
use crate::ranker::RankerConfig;
use crate::text::{PosTagger, QueryTermMode, StopWordList};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold set is empty")]
    EmptyGold,
    #[error("{results} result lists for {gold} gold entries")]
    Misaligned { results: usize, gold: usize },
    #[error("K must be at least 1")]
    ZeroK,
    #[error("cannot read gold file {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("gold file line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldEntry {
    pub query: String,
    pub relevant: BTreeSet<String>,
}

impl GoldEntry {
    pub fn new<I, S>(query: impl Into<String>, relevant: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            query: query.into(),
            relevant: relevant.into_iter().map(Into::into).collect(),
        }
    }
}

/// Parses `query<TAB>Api1,Api2,...` lines. Lines starting with `#` and blank
/// lines are skipped.
pub fn parse_gold(text: &str) -> Result<Vec<GoldEntry>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some((query, apis)) = line.split_once('\t') else {
            return Err(EvalError::Parse {
                line: line_no,
                message: "expected query<TAB>comma-separated API names".into(),
            });
        };
        let query = query.trim();
        let relevant: BTreeSet<String> = apis
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(str::to_string)
            .collect();
        if query.is_empty() {
            return Err(EvalError::Parse { line: line_no, message: "empty query".into() });
        }
        if relevant.is_empty() {
            return Err(EvalError::Parse { line: line_no, message: "no relevant APIs".into() });
        }
        out.push(GoldEntry {
            query: query.to_string(),
            relevant,
        });
    }
    Ok(out)
}

pub fn load_gold(path: impl AsRef<Path>) -> Result<Vec<GoldEntry>, EvalError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_gold(&text)
}

fn check<T: AsRef<str>>(results: &[Vec<T>], gold: &[GoldEntry], k: usize) -> Result<(), EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    if results.len() != gold.len() {
        return Err(EvalError::Misaligned {
            results: results.len(),
            gold: gold.len(),
        });
    }
    if k == 0 {
        return Err(EvalError::ZeroK);
    }
    Ok(())
}

fn top<T: AsRef<str>>(list: &[T], k: usize) -> &[T] {
    &list[..list.len().min(k)]
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

/// Percentage of queries with at least one relevant API in the top K.
pub fn top_k_accuracy<T: AsRef<str>>(results: &[Vec<T>], gold: &[GoldEntry], k: usize) -> Result<f64, EvalError> {
    check(results, gold, k)?;
    let hits = results
        .iter()
        .zip(gold)
        .filter(|(r, g)| top(r, k).iter().any(|a| g.relevant.contains(a.as_ref())))
        .count();
    Ok(100.0 * hits as f64 / gold.len() as f64)
}

/// Mean of 1/rank of the first relevant API within the top K (0 if none).
pub fn mrr_at_k<T: AsRef<str>>(results: &[Vec<T>], gold: &[GoldEntry], k: usize) -> Result<f64, EvalError> {
    check(results, gold, k)?;
    Ok(mean(
        results.iter().zip(gold).map(|(r, g)| {
            top(r, k)
                .iter()
                .position(|a| g.relevant.contains(a.as_ref()))
                .map_or(0.0, |p| 1.0 / (p + 1) as f64)
        }),
        gold.len(),
    ))
}

/// Average precision over the relevant APIs found in the top K; 0 when none
/// is found.
pub fn average_precision_at_k<T: AsRef<str>>(ranked: &[T], relevant: &BTreeSet<String>, k: usize) -> f64 {
    let mut found = 0usize;
    let mut sum = 0.0;
    for (i, a) in top(ranked, k).iter().enumerate() {
        if relevant.contains(a.as_ref()) {
            found += 1;
            sum += found as f64 / (i + 1) as f64;
        }
    }
    if found == 0 {
        0.0
    } else {
        sum / found as f64
    }
}

/// Mean average precision at K, as a percentage.
pub fn map_at_k<T: AsRef<str>>(results: &[Vec<T>], gold: &[GoldEntry], k: usize) -> Result<f64, EvalError> {
    check(results, gold, k)?;
    Ok(100.0 * mean(results.iter().zip(gold).map(|(r, g)| average_precision_at_k(r, &g.relevant, k)), gold.len()))
}

/// Mean fraction of each query's gold APIs found in the top K, as a percentage.
pub fn mean_recall_at_k<T: AsRef<str>>(results: &[Vec<T>], gold: &[GoldEntry], k: usize) -> Result<f64, EvalError> {
    check(results, gold, k)?;
    Ok(100.0
        * mean(
            results.iter().zip(gold).map(|(r, g)| {
                let hit: BTreeSet<&str> = top(r, k)
                    .iter()
                    .map(AsRef::as_ref)
                    .filter(|a| g.relevant.contains(*a))
                    .collect();
                hit.len() as f64 / g.relevant.len() as f64
            }),
            gold.len(),
        ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub k: usize,
    pub top_k_accuracy: f64,
    pub mrr: f64,
    pub map: f64,
    pub mean_recall: f64,
}

/// All four metrics at every requested K for one set of results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub query_count: usize,
    pub rows: Vec<MetricsRow>,
}

pub fn compute_metrics<T: AsRef<str>>(results: &[Vec<T>], gold: &[GoldEntry], ks: &[usize]) -> Result<MetricsReport, EvalError> {
    let rows = ks
        .iter()
        .map(|&k| {
            Ok(MetricsRow {
                k,
                top_k_accuracy: top_k_accuracy(results, gold, k)?,
                mrr: mrr_at_k(results, gold, k)?,
                map: map_at_k(results, gold, k)?,
                mean_recall: mean_recall_at_k(results, gold, k)?,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(MetricsReport {
        query_count: gold.len(),
        rows,
    })
}

/// A gold query the ranker could not answer; it counts as an empty result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryFailure {
    pub query: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub mode: QueryTermMode,
    pub metrics: MetricsReport,
    pub failures: Vec<QueryFailure>,
}

/// Ranks every gold query under each mode and scores the results at every K.
pub fn run_experiment(
    indices: &Indices,
    gold: &[GoldEntry],
    stops: &StopWordList,
    tagger: &dyn PosTagger,
    ranker: &RankerConfig,
    modes: &[QueryTermMode],
    ks: &[usize],
) -> Result<Vec<ModeReport>, EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    let max_k = *ks.iter().max().ok_or(EvalError::ZeroK)?;
    if ks.contains(&0) {
        return Err(EvalError::ZeroK);
    }
    modes
        .iter()
        .map(|&mode| {
            let cfg = QueryConfig {
                mode,
                ranker: RankerConfig { top_k: max_k, ..*ranker },
            };
            let outcomes: Vec<Result<Vec<String>, QueryFailure>> = gold
                .par_iter()
                .map(|g| {
                    recommend(indices, &g.query, stops, tagger, &cfg)
                        .map(|r| r.apis.into_iter().map(|s| String::from(s.api)).collect())
                        .map_err(|e| QueryFailure {
                            query: g.query.clone(),
                            reason: e.to_string(),
                        })
                })
                .collect();
            let mut failures = Vec::new();
            let results: Vec<Vec<String>> = outcomes
                .into_iter()
                .map(|o| {
                    o.unwrap_or_else(|f| {
                        failures.push(f);
                        Vec::new()
                    })
                })
                .collect();
            Ok(ModeReport {
                mode,
                metrics: compute_metrics(&results, gold, ks)?,
                failures,
            })
        })
        .collect()
}

/// Long-format TSV: one row per mode and K.
pub fn render_tsv(reports: &[ModeReport]) -> String {
    let mut out = String::from("mode\tk\ttop_k_accuracy\tmrr\tmap\tmean_recall\tqueries\tfailures\n");
    for r in reports {
        for row in &r.metrics.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{:.2}\t{:.4}\t{:.2}\t{:.2}\t{}\t{}",
                r.mode,
                row.k,
                row.top_k_accuracy,
                row.mrr,
                row.map,
                row.mean_recall,
                r.metrics.query_count,
                r.failures.len()
            );
        }
    }
    out
}

type MetricLine = (&'static str, fn(&MetricsRow) -> String);

/// One block per mode: metric rows, one column per K.
pub fn render_table(reports: &[ModeReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "Query terms: {} ({} queries, {} failed)",
            r.mode,
            r.metrics.query_count,
            r.failures.len()
        );
        let _ = write!(out, "{:<32}", "Metric");
        for row in &r.metrics.rows {
            let _ = write!(out, "{:>10}", format!("Top-{}", row.k));
        }
        out.push('\n');
        let lines: [MetricLine; 4] = [
            ("Top-K Accuracy", |m| format!("{:.2}%", m.top_k_accuracy)),
            ("Mean Reciprocal Rank@K (MRR@K)", |m| format!("{:.2}", m.mrr)),
            ("Mean Average Precision@K", |m| format!("{:.2}%", m.map)),
            ("Mean Recall@K (MR@K)", |m| format!("{:.2}%", m.mean_recall)),
        ];
        for (label, f) in lines {
            let _ = write!(out, "{label:<32}");
            for row in &r.metrics.rows {
                let _ = write!(out, "{:>10}", f(row));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
